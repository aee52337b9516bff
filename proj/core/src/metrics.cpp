#include "proximix/metrics.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "proximix/errors.hpp"

namespace proximix {

namespace {

// 0/0 -> 0 convention; `defined` reports whether the denominator was nonzero
double safe_rate(long numerator, long denominator, bool& defined) {
    if (denominator == 0) {
        defined = false;
        return 0.0;
    }
    defined = true;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

ConfusionCounts group_confusion(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred,
                                const Eigen::VectorXi& z, int group, bool& group_seen) {
    ConfusionCounts c;
    group_seen = false;
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        if (z(i) != group) continue;
        group_seen = true;
        if (y_true(i) == 1)
            (y_pred(i) == 1 ? c.tp : c.fn) += 1;
        else
            (y_pred(i) == 1 ? c.fp : c.tn) += 1;
    }
    return c;
}

}  // namespace

ConfusionCounts confusion(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred) {
    if (y_true.size() != y_pred.size())
        throw LengthMismatchError("label vectors differ in length");
    if (y_true.size() == 0) throw EmptyInputError("cannot build a confusion matrix of nothing");
    ConfusionCounts c;
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        if (y_true(i) == 1)
            (y_pred(i) == 1 ? c.tp : c.fn) += 1;
        else
            (y_pred(i) == 1 ? c.fp : c.tn) += 1;
    }
    return c;
}

Prf precision_recall_f1(const ConfusionCounts& c) {
    Prf out;
    out.precision = safe_rate(c.tp, c.tp + c.fp, out.precision_defined);
    out.recall = safe_rate(c.tp, c.tp + c.fn, out.recall_defined);
    double denom = out.precision + out.recall;
    if (denom == 0.0) {
        out.f1 = 0.0;
        out.f1_defined = false;
    } else {
        out.f1 = 2.0 * out.precision * out.recall / denom;
    }
    return out;
}

double accuracy(const ConfusionCounts& c) {
    long total = c.total();
    if (total == 0) return 0.0;
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

GroupRates subgroup_rates(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred,
                          const Eigen::VectorXi& z, int group) {
    if (y_true.size() != y_pred.size() || y_true.size() != z.size())
        throw LengthMismatchError("label and group vectors differ in length");
    bool seen = false;
    ConfusionCounts c = group_confusion(y_true, y_pred, z, group, seen);
    if (!seen) throw EmptyGroupError("no rows with z == " + std::to_string(group));
    GroupRates rates;
    rates.tpr = safe_rate(c.tp, c.tp + c.fn, rates.tpr_defined);
    rates.fpr = safe_rate(c.fp, c.fp + c.tn, rates.fpr_defined);
    return rates;
}

double demographic_parity(const Eigen::VectorXi& y_pred, const Eigen::VectorXi& z, int group) {
    if (y_pred.size() != z.size())
        throw LengthMismatchError("prediction and group vectors differ in length");
    long in_group = 0;
    long positive = 0;
    for (Eigen::Index i = 0; i < y_pred.size(); ++i) {
        if (z(i) != group) continue;
        ++in_group;
        if (y_pred(i) == 1) ++positive;
    }
    if (in_group == 0) throw EmptyGroupError("no rows with z == " + std::to_string(group));
    return static_cast<double>(positive) / static_cast<double>(in_group);
}

GapResult dp_gap(double dp0, double dp1) {
    GapResult out;
    out.diff = dp1 - dp0;
    if (dp1 == 0.0) {
        out.ratio = 0.0;
        out.ratio_defined = false;
    } else {
        out.ratio = dp0 / dp1;
    }
    return out;
}

GapResult eodds_gap(double tpr0, double tpr1, double fpr0, double fpr1) {
    GapResult out;
    out.diff = std::max(tpr1 - tpr0, fpr1 - fpr0);
    if (tpr1 == 0.0 || fpr1 == 0.0) {
        out.ratio = 0.0;
        out.ratio_defined = false;
    } else {
        out.ratio = std::min(tpr0 / tpr1, fpr0 / fpr1);
    }
    return out;
}

FairnessReport report_from_predictions(const Eigen::VectorXi& y_true,
                                       const Eigen::VectorXi& y_pred,
                                       const Eigen::VectorXi& z) {
    if (y_true.size() != y_pred.size() || y_true.size() != z.size())
        throw LengthMismatchError("label and group vectors differ in length");
    if (y_true.size() == 0) throw EmptyInputError("cannot evaluate an empty test set");

    FairnessReport report;
    ConfusionCounts overall = confusion(y_true, y_pred);
    report.accuracy = accuracy(overall);
    Prf prf = precision_recall_f1(overall);
    report.precision = prf.precision;
    report.recall = prf.recall;
    report.f1 = prf.f1;
    if (!prf.precision_defined) report.convention_notes.push_back("precision 0/0");
    if (!prf.recall_defined) report.convention_notes.push_back("recall 0/0");
    if (!prf.f1_defined) report.convention_notes.push_back("f1 0/0");

    for (int group : {0, 1}) {
        bool seen = false;
        ConfusionCounts gc = group_confusion(y_true, y_pred, z, group, seen);
        if (!seen) throw EmptyGroupError("no rows with z == " + std::to_string(group));
        const std::string prefix = group == 1 ? "m_" : "f_";
        GroupMetrics& gm = group == 1 ? report.group1 : report.group0;
        Prf gprf = precision_recall_f1(gc);
        gm.f1 = gprf.f1;
        if (!gprf.f1_defined) report.convention_notes.push_back(prefix + "f1 0/0");
        GroupRates rates = subgroup_rates(y_true, y_pred, z, group);
        gm.tpr = rates.tpr;
        gm.fpr = rates.fpr;
        if (!rates.tpr_defined) report.convention_notes.push_back(prefix + "tpr 0/0");
        if (!rates.fpr_defined) report.convention_notes.push_back(prefix + "fpr 0/0");
        gm.dp = demographic_parity(y_pred, z, group);
    }

    GapResult dp = dp_gap(report.group0.dp, report.group1.dp);
    report.dp_diff = dp.diff;
    report.dp_ratio = dp.ratio;
    report.dp_ratio_defined = dp.ratio_defined;
    if (!dp.ratio_defined) report.convention_notes.push_back("dp_ratio undefined");

    GapResult eodds =
        eodds_gap(report.group0.tpr, report.group1.tpr, report.group0.fpr, report.group1.fpr);
    report.eodds_diff = eodds.diff;
    report.eodds_ratio = eodds.ratio;
    report.eodds_ratio_defined = eodds.ratio_defined;
    if (!eodds.ratio_defined) report.convention_notes.push_back("eodds_ratio undefined");

    return report;
}

FairnessReport full_report(const TrainedModel& model, const EncodedDataset& test) {
    if (test.size() == 0) throw EmptyInputError("cannot evaluate an empty test set");
    Eigen::VectorXi y_true(test.labels.size());
    for (Eigen::Index i = 0; i < test.labels.size(); ++i)
        y_true(i) = test.labels(i) >= 0.5 ? 1 : 0;
    Eigen::VectorXi y_pred = model.predict_labels(test.features);
    return report_from_predictions(y_true, y_pred, test.sensitive);
}

std::string FairnessReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["acc"] = accuracy;
    doc["f1"] = f1;
    doc["dp_diff"] = dp_diff;
    doc["dp_ratio"] = dp_ratio;
    doc["eodds_diff"] = eodds_diff;
    doc["eodds_ratio"] = eodds_ratio;
    doc["m_f1"] = group1.f1;
    doc["m_tpr"] = group1.tpr;
    doc["m_fpr"] = group1.fpr;
    doc["f_f1"] = group0.f1;
    doc["f_tpr"] = group0.tpr;
    doc["f_fpr"] = group0.fpr;
    return doc.dump();
}

}  // namespace proximix
