#pragma once

#include <Eigen/Dense>
#include <string>

#include "proximix/dataset.hpp"
#include "proximix/models.hpp"

namespace proximix {

struct CounterfactualResult {
    int source_index = -1;  // row in the evaluated set; -1 for ad-hoc queries
    int cf_index = -1;      // row in the candidate pool
    Eigen::RowVectorXd cf_features;
    double cost = 0.0;
    bool found = false;
};

struct RecourseGroupStats {
    double avg = 0.0;
    double std = 0.0;  // population (divide by n)
    long count = 0;
};

struct RecourseReport {
    RecourseGroupStats group0;  // z = 0
    RecourseGroupStats group1;  // z = 1
    double delta_avg = 0.0;
    double delta_std = 0.0;

    // JSON object with keys exactly: m_avg, m_std, f_avg, f_std,
    // delta_avg, delta_std, m_count, f_count (m = z1, f = z0)
    std::string to_json() const;
};

// Nearest pool row whose predicted label differs from the prediction for x;
// cost is the Euclidean distance, ties resolve to the lowest pool index.
// found=false when no pool row flips the prediction.
CounterfactualResult find_counterfactual(const TrainedModel& model,
                                         const Eigen::RowVectorXd& x,
                                         const EncodedDataset& candidate_pool);

// Per-group average/std of counterfactual cost over the test rows whose
// search succeeded, plus the absolute between-group gaps.
RecourseReport group_recourse_report(const TrainedModel& model, const EncodedDataset& test,
                                     const EncodedDataset& pool);

}  // namespace proximix
