#include "proximix/recourse.hpp"

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "proximix/errors.hpp"
#include "proximix/mixing.hpp"

namespace proximix {

namespace {

CounterfactualResult nearest_flipped(const Eigen::RowVectorXd& x, int source_label,
                                     const EncodedDataset& pool,
                                     const Eigen::VectorXi& pool_labels) {
    CounterfactualResult result;
    for (Eigen::Index i = 0; i < pool.features.rows(); ++i) {
        if (pool_labels(i) == source_label) continue;
        double dist = euclidean_distance(x, pool.features.row(i));
        if (!result.found || dist < result.cost) {
            result.found = true;
            result.cf_index = static_cast<int>(i);
            result.cost = dist;
        }
    }
    if (result.found) result.cf_features = pool.features.row(result.cf_index);
    return result;
}

RecourseGroupStats stats_of(const std::vector<double>& costs) {
    RecourseGroupStats s;
    s.count = static_cast<long>(costs.size());
    if (costs.empty()) return s;
    double sum = 0.0;
    for (double c : costs) sum += c;
    s.avg = sum / static_cast<double>(costs.size());
    double sq = 0.0;
    for (double c : costs) sq += (c - s.avg) * (c - s.avg);
    s.std = std::sqrt(sq / static_cast<double>(costs.size()));
    return s;
}

}  // namespace

CounterfactualResult find_counterfactual(const TrainedModel& model,
                                         const Eigen::RowVectorXd& x,
                                         const EncodedDataset& candidate_pool) {
    if (candidate_pool.size() == 0)
        throw EmptyInputError("counterfactual search needs a nonempty candidate pool");
    Eigen::VectorXi pool_labels = model.predict_labels(candidate_pool.features);
    return nearest_flipped(x, model.predict_label(x), candidate_pool, pool_labels);
}

RecourseReport group_recourse_report(const TrainedModel& model, const EncodedDataset& test,
                                     const EncodedDataset& pool) {
    if (test.size() == 0) throw EmptyInputError("cannot evaluate recourse on an empty test set");
    if (pool.size() == 0)
        throw EmptyInputError("counterfactual search needs a nonempty candidate pool");

    Eigen::VectorXi pool_labels = model.predict_labels(pool.features);
    Eigen::VectorXi test_labels = model.predict_labels(test.features);

    bool group_present[2] = {false, false};
    std::vector<double> costs[2];
    for (Eigen::Index i = 0; i < test.features.rows(); ++i) {
        int z = test.sensitive(i);
        group_present[z] = true;
        CounterfactualResult cf =
            nearest_flipped(test.features.row(i), test_labels(i), pool, pool_labels);
        if (cf.found) costs[z].push_back(cf.cost);
    }
    for (int g : {0, 1}) {
        if (!group_present[g])
            throw EmptyGroupError("no test rows with z == " + std::to_string(g));
        if (costs[g].empty())
            throw NoCounterfactualsError("no counterfactual found for any row with z == " +
                                         std::to_string(g));
    }

    RecourseReport report;
    report.group0 = stats_of(costs[0]);
    report.group1 = stats_of(costs[1]);
    report.delta_avg = std::abs(report.group1.avg - report.group0.avg);
    report.delta_std = std::abs(report.group1.std - report.group0.std);
    return report;
}

std::string RecourseReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["m_avg"] = group1.avg;
    doc["m_std"] = group1.std;
    doc["f_avg"] = group0.avg;
    doc["f_std"] = group0.std;
    doc["delta_avg"] = delta_avg;
    doc["delta_std"] = delta_std;
    doc["m_count"] = group1.count;
    doc["f_count"] = group0.count;
    return doc.dump();
}

}  // namespace proximix
