#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "proximix/dataset.hpp"
#include "proximix/models.hpp"

namespace proximix {

struct ConfusionCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;
    long total() const { return tp + fp + fn + tn; }
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // false where a 0/0 was replaced by the 0 convention
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

struct GroupRates {
    double tpr = 0.0;
    double fpr = 0.0;
    bool tpr_defined = true;
    bool fpr_defined = true;
};

struct GapResult {
    double diff = 0.0;
    double ratio = 0.0;
    bool ratio_defined = true;  // false when a ratio denominator was 0
};

struct GroupMetrics {
    double f1 = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    double dp = 0.0;
};

// Mirrors the report layout: overall accuracy/F1, the two parity gaps, and
// the per-group F1/TPR/FPR breakdown (group1 = privileged).
struct FairnessReport {
    double accuracy = 0.0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    GroupMetrics group0;
    GroupMetrics group1;
    double dp_diff = 0.0;
    double dp_ratio = 0.0;
    double eodds_diff = 0.0;
    double eodds_ratio = 0.0;
    bool dp_ratio_defined = true;
    bool eodds_ratio_defined = true;
    // names of quantities where a 0/0 (or x/0) hit the 0 convention
    std::vector<std::string> convention_notes;

    // JSON object with keys exactly: acc, f1, dp_diff, dp_ratio, eodds_diff,
    // eodds_ratio, m_f1, m_tpr, m_fpr, f_f1, f_tpr, f_fpr (m = z1, f = z0)
    std::string to_json() const;
};

ConfusionCounts confusion(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred);
Prf precision_recall_f1(const ConfusionCounts& c);
double accuracy(const ConfusionCounts& c);

// TPR/FPR restricted to rows with z == group
GroupRates subgroup_rates(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred,
                          const Eigen::VectorXi& z, int group);

// positive-prediction rate within the group
double demographic_parity(const Eigen::VectorXi& y_pred, const Eigen::VectorXi& z, int group);

// diff = dp1 - dp0 (signed); ratio = dp0 / dp1, flagged undefined when dp1 == 0
GapResult dp_gap(double dp0, double dp1);

// diff = max(tpr1 - tpr0, fpr1 - fpr0), signed and unclamped;
// ratio = min(tpr0/tpr1, fpr0/fpr1), flagged undefined when a denominator is 0
GapResult eodds_gap(double tpr0, double tpr1, double fpr0, double fpr1);

FairnessReport report_from_predictions(const Eigen::VectorXi& y_true,
                                       const Eigen::VectorXi& y_pred,
                                       const Eigen::VectorXi& z);
FairnessReport full_report(const TrainedModel& model, const EncodedDataset& test);

}  // namespace proximix
