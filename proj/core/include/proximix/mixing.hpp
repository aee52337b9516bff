#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "proximix/dataset.hpp"

namespace proximix {

// Knobs of the proximity-aware mixer. d balances the pairwise mixed label
// against the proximity label; below min_neighbors proximal samples the
// proximity label is not trusted and plain mixup is used.
struct MixConfig {
    double d = 0.5;
    double alpha = 1.0;       // Beta(alpha, alpha) for the mixing ratio
    int pool_size_k = 25;
    int min_neighbors = 5;
    int gen_count_m = 1;
    std::uint64_t seed = 42;

    void validate() const;
};

// Anchor subgroup (z and y fixed) plus the partner pool, which is always
// the opposite sensitive group.
struct SamplingStrategy {
    SubgroupSelector anchor;  // y required
    int partner_z = 1;

    void validate() const;
};

// The four named sampling combinations: C1=(z0,y0), C2=(z0,y1), C3=(z1,y0),
// C4=(z1,y1); primed partners are the opposite sensitive group.
SamplingStrategy strategy_by_name(const std::string& name);
std::vector<std::string> strategy_names();
std::string strategy_name(const SamplingStrategy& s);

struct MixedSample {
    Eigen::RowVectorXd features;
    double label = 0.0;
    int sensitive = 0;
    struct Provenance {
        std::size_t anchor_index = 0;   // row in the training set
        std::size_t partner_index = 0;  // row in the training set
        double lambda = 0.0;
        double y_lambda = 0.0;
        double y_sim = 0.0;
        std::size_t proxi_set_size = 0;
    } provenance;
};

struct GenerationStats {
    std::size_t anchors_drawn = 0;
    std::size_t credibility_fallbacks = 0;
};

// L2 norm of the difference, plain ascending coordinate loop so results are
// reproducible bit for bit. Throws DimensionMismatch.
double euclidean_distance(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b);

// Pool indices whose distance to x0 is <= p_dis, ascending.
std::vector<std::size_t> proximity_set(const Eigen::RowVectorXd& x0,
                                       const EncodedDataset& pool, double p_dis);

// Positive-label fraction over the multiset {s0_label} + proxi_labels.
double y_sim(double s0_label, const std::vector<double>& proxi_labels);

// lambda*y0 + (1-lambda)*y1; exact at the endpoints and for equal labels.
double lambda_mix(double y0, double y1, double lambda);

// Coordinate-wise convex combination, clamped into the parent interval so
// rounding can never push a coordinate outside it.
Eigen::RowVectorXd mix_features(const Eigen::RowVectorXd& x0,
                                const Eigen::RowVectorXd& x1, double lambda);

// The mixed sample keeps the anchor's sensitive value only when its mixing
// share is strictly over one half.
int assign_sensitive(int z0, int z1, double lambda);

struct BlendedLabel {
    double label = 0.0;
    double y_lambda = 0.0;
    double y_sim = 0.0;
    std::size_t proxi_set_size = 0;
};

// d*Y_lambda + (1-d)*Y_sim with the proximity set taken over the whole
// opposite-group pool; degrades to Y_lambda when the set is not credible.
BlendedLabel proximix_label(const Eigen::RowVectorXd& x0, double y0,
                            const Eigen::RowVectorXd& x1, double y1,
                            const EncodedDataset& pool, const MixConfig& cfg,
                            double lambda);

// min(K, |pool|) nearest pool indices, sorted ascending by distance,
// ties broken by ascending index.
std::vector<std::size_t> knn_pool(const Eigen::RowVectorXd& x0,
                                  const EncodedDataset& pool, int k);

// Draws anchors from the strategy subgroup, walks each anchor's K nearest
// opposite-group partners furthest first, and emits exactly gen_count_m
// mixed samples. Deterministic given (cfg.seed, strategy, cfg.d).
std::vector<MixedSample> generate(const EncodedDataset& train,
                                  const SamplingStrategy& strategy,
                                  const MixConfig& cfg,
                                  GenerationStats* stats = nullptr);

// Training set plus generated rows.
EncodedDataset augment(const EncodedDataset& train,
                       const std::vector<MixedSample>& samples);

// Seed stream for one generate() call.
std::uint64_t generation_seed(std::uint64_t seed, const SamplingStrategy& strategy,
                              double d);

}  // namespace proximix
