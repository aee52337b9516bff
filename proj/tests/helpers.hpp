#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "proximix/dataset.hpp"
#include "proximix/rng.hpp"

namespace testutil {

inline proximix::EncodedDataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
                                             Eigen::VectorXi z) {
    proximix::EncodedDataset ds;
    ds.features = std::move(X);
    ds.labels = std::move(y);
    ds.sensitive = std::move(z);
    for (Eigen::Index c = 0; c < ds.features.cols(); ++c)
        ds.feature_names.push_back("f" + std::to_string(c));
    return ds;
}

// uniform features, fair-coin labels and groups; the first four rows cover
// every (z, y) combination so subgroup selectors never come up empty
inline proximix::EncodedDataset random_dataset(proximix::Rng& rng, int n, int dims) {
    Eigen::MatrixXd X(n, dims);
    Eigen::VectorXd y(n);
    Eigen::VectorXi z(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < dims; ++c) X(r, c) = rng.uniform();
        y(r) = rng.uniform() < 0.5 ? 1.0 : 0.0;
        z(r) = rng.uniform() < 0.5 ? 1 : 0;
    }
    if (n >= 4) {
        z(0) = 0; y(0) = 0;
        z(1) = 0; y(1) = 1;
        z(2) = 1; y(2) = 0;
        z(3) = 1; y(3) = 1;
    }
    return make_dataset(std::move(X), std::move(y), std::move(z));
}

// independent scalar-loop distance (same ascending order as the library's
// contract, recomputed here so tests do not simply call the code under test)
inline double dist_oracle(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double diff = a(i) - b(i);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

inline std::vector<std::size_t> brute_proximity(const Eigen::RowVectorXd& x0,
                                                const proximix::EncodedDataset& pool,
                                                double p_dis) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (dist_oracle(x0, pool.features.row(static_cast<Eigen::Index>(i))) <= p_dis)
            idx.push_back(i);
    return idx;
}

inline double brute_y_sim(double s0_label, const std::vector<double>& proxi_labels) {
    int pos = s0_label > 0.5 ? 1 : 0;
    for (double l : proxi_labels) pos += l > 0.5 ? 1 : 0;
    return static_cast<double>(pos) / static_cast<double>(proxi_labels.size() + 1);
}

inline std::vector<std::size_t> brute_knn(const Eigen::RowVectorXd& x0,
                                          const proximix::EncodedDataset& pool, int k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < pool.size(); ++i)
        all.emplace_back(dist_oracle(x0, pool.features.row(static_cast<Eigen::Index>(i))), i);
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < all.size() && i < static_cast<std::size_t>(k); ++i)
        idx.push_back(all[i].second);
    return idx;
}

}  // namespace testutil
