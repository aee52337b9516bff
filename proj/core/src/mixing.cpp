#include "proximix/mixing.hpp"

#include <algorithm>
#include <cmath>

#include "proximix/errors.hpp"
#include "proximix/rng.hpp"

namespace proximix {

void MixConfig::validate() const {
    if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("balancing degree d must be in [0, 1]");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (pool_size_k < 1) throw ConfigError("pool_size_k must be positive");
    if (min_neighbors < 0) throw ConfigError("min_neighbors must be non-negative");
    if (min_neighbors > pool_size_k)
        throw ConfigError("min_neighbors must not exceed pool_size_k");
    if (gen_count_m < 1) throw ConfigError("gen_count_m must be at least 1");
}

void SamplingStrategy::validate() const {
    if (!anchor.y) throw ConfigError("sampling strategy anchor requires a label value");
    if (partner_z != 1 - anchor.z)
        throw ConfigError("partner pool must be the opposite sensitive group");
}

SamplingStrategy strategy_by_name(const std::string& name) {
    if (name == "C1C1p") return {{0, 0}, 1};
    if (name == "C2C1p") return {{0, 1}, 1};
    if (name == "C3C3p") return {{1, 0}, 0};
    if (name == "C4C3p") return {{1, 1}, 0};
    throw ConfigError("unknown sampling strategy: " + name);
}

std::vector<std::string> strategy_names() { return {"C1C1p", "C2C1p", "C3C3p", "C4C3p"}; }

std::string strategy_name(const SamplingStrategy& s) {
    for (const auto& name : strategy_names()) {
        SamplingStrategy known = strategy_by_name(name);
        if (known.anchor == s.anchor && known.partner_z == s.partner_z) return name;
    }
    std::string y = s.anchor.y ? std::to_string(*s.anchor.y) : "-";
    return "z" + std::to_string(s.anchor.z) + "y" + y + "_p" + std::to_string(s.partner_z);
}

double euclidean_distance(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    if (a.size() != b.size())
        throw DimensionMismatchError("euclidean_distance: " + std::to_string(a.size()) +
                                     " vs " + std::to_string(b.size()));
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double diff = a(i) - b(i);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

std::vector<std::size_t> proximity_set(const Eigen::RowVectorXd& x0,
                                       const EncodedDataset& pool, double p_dis) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (euclidean_distance(x0, pool.features.row(static_cast<Eigen::Index>(i))) <= p_dis)
            idx.push_back(i);
    }
    return idx;
}

double y_sim(double s0_label, const std::vector<double>& proxi_labels) {
    std::size_t positives = s0_label > 0.5 ? 1 : 0;
    for (double l : proxi_labels)
        if (l > 0.5) ++positives;
    return static_cast<double>(positives) / static_cast<double>(1 + proxi_labels.size());
}

double lambda_mix(double y0, double y1, double lambda) {
    if (y0 == y1) return y0;
    return lambda * y0 + (1.0 - lambda) * y1;
}

Eigen::RowVectorXd mix_features(const Eigen::RowVectorXd& x0,
                                const Eigen::RowVectorXd& x1, double lambda) {
    if (x0.size() != x1.size())
        throw DimensionMismatchError("mix_features: " + std::to_string(x0.size()) + " vs " +
                                     std::to_string(x1.size()));
    Eigen::RowVectorXd out(x0.size());
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        double lo = std::min(x0(i), x1(i));
        double hi = std::max(x0(i), x1(i));
        out(i) = std::clamp(lambda * x0(i) + (1.0 - lambda) * x1(i), lo, hi);
    }
    return out;
}

int assign_sensitive(int z0, int z1, double lambda) {
    return lambda > 0.5 ? z0 : z1;
}

namespace {

double blend(double d, double y_lambda_v, double y_sim_v) {
    if (y_lambda_v == y_sim_v) return y_lambda_v;
    return d * y_lambda_v + (1.0 - d) * y_sim_v;
}

BlendedLabel label_from_distances(const std::vector<double>& dists, double p_dis,
                                  double y0, double y1, const EncodedDataset& pool,
                                  const MixConfig& cfg, double lambda) {
    BlendedLabel out;
    std::vector<double> proxi_labels;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        if (dists[i] <= p_dis)
            proxi_labels.push_back(pool.labels(static_cast<Eigen::Index>(i)));
    }
    out.proxi_set_size = proxi_labels.size();
    out.y_lambda = lambda_mix(y0, y1, lambda);
    out.y_sim = y_sim(y0, proxi_labels);
    if (out.proxi_set_size < static_cast<std::size_t>(cfg.min_neighbors))
        out.label = out.y_lambda;  // proximity evidence too thin
    else
        out.label = blend(cfg.d, out.y_lambda, out.y_sim);
    return out;
}

}  // namespace

BlendedLabel proximix_label(const Eigen::RowVectorXd& x0, double y0,
                            const Eigen::RowVectorXd& x1, double y1,
                            const EncodedDataset& pool, const MixConfig& cfg,
                            double lambda) {
    double p_dis = euclidean_distance(x0, x1);
    std::vector<double> dists(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        dists[i] = euclidean_distance(x0, pool.features.row(static_cast<Eigen::Index>(i)));
    return label_from_distances(dists, p_dis, y0, y1, pool, cfg, lambda);
}

std::vector<std::size_t> knn_pool(const Eigen::RowVectorXd& x0,
                                  const EncodedDataset& pool, int k) {
    if (pool.size() == 0) throw EmptySubgroupError("knn_pool: empty pool");
    std::vector<std::pair<double, std::size_t>> order(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        order[i] = {euclidean_distance(x0, pool.features.row(static_cast<Eigen::Index>(i))), i};
    std::sort(order.begin(), order.end());
    std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = order[i].second;
    return idx;
}

std::uint64_t generation_seed(std::uint64_t seed, const SamplingStrategy& strategy,
                              double d) {
    std::uint64_t tag = static_cast<std::uint64_t>(strategy.anchor.z) |
                        (static_cast<std::uint64_t>(strategy.anchor.y.value_or(0)) << 1) |
                        (static_cast<std::uint64_t>(strategy.partner_z) << 2);
    std::uint64_t h = seed_combine(seed, seed_mix(0x67656e65ULL));  // "gene" stream
    h = seed_combine(h, tag);
    return seed_combine(h, seed_of(d));
}

std::vector<MixedSample> generate(const EncodedDataset& train,
                                  const SamplingStrategy& strategy,
                                  const MixConfig& cfg, GenerationStats* stats) {
    cfg.validate();
    strategy.validate();

    auto anchor_rows = subgroup_indices(train, strategy.anchor);
    auto partner_rows = subgroup_indices(train, {strategy.partner_z, std::nullopt});
    EncodedDataset partner_pool = take_rows(train, partner_rows);

    Rng rng(generation_seed(cfg.seed, strategy, cfg.d));
    std::vector<MixedSample> samples;
    samples.reserve(static_cast<std::size_t>(cfg.gen_count_m));
    GenerationStats local;

    while (samples.size() < static_cast<std::size_t>(cfg.gen_count_m)) {
        std::size_t anchor_row = anchor_rows[rng.uniform_index(anchor_rows.size())];
        ++local.anchors_drawn;
        Eigen::RowVectorXd x0 = train.features.row(static_cast<Eigen::Index>(anchor_row));
        double y0 = train.labels(static_cast<Eigen::Index>(anchor_row));

        // one distance pass per anchor; the K-queue and every ProxiSet
        // below reuse it
        std::vector<double> dists(partner_pool.size());
        for (std::size_t i = 0; i < partner_pool.size(); ++i)
            dists[i] = euclidean_distance(
                x0, partner_pool.features.row(static_cast<Eigen::Index>(i)));

        std::vector<std::pair<double, std::size_t>> order(partner_pool.size());
        for (std::size_t i = 0; i < partner_pool.size(); ++i) order[i] = {dists[i], i};
        std::sort(order.begin(), order.end());
        std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.pool_size_k),
                                              order.size());

        // furthest-first walk of the K nearest partners
        for (std::size_t j = k; j-- > 0 && samples.size() < static_cast<std::size_t>(cfg.gen_count_m);) {
            std::size_t partner = order[j].second;
            double p_dis = order[j].first;
            double lambda = rng.beta(cfg.alpha);

            Eigen::RowVectorXd x1 =
                partner_pool.features.row(static_cast<Eigen::Index>(partner));
            double y1 = partner_pool.labels(static_cast<Eigen::Index>(partner));

            MixedSample s;
            s.features = mix_features(x0, x1, lambda);
            BlendedLabel bl =
                label_from_distances(dists, p_dis, y0, y1, partner_pool, cfg, lambda);
            s.label = bl.label;
            s.sensitive = assign_sensitive(strategy.anchor.z, strategy.partner_z, lambda);
            s.provenance = {anchor_row, partner_rows[partner], lambda,
                            bl.y_lambda,  bl.y_sim,             bl.proxi_set_size};
            if (bl.proxi_set_size < static_cast<std::size_t>(cfg.min_neighbors))
                ++local.credibility_fallbacks;
            samples.push_back(std::move(s));
        }
    }
    if (stats) *stats = local;
    return samples;
}

EncodedDataset augment(const EncodedDataset& train,
                       const std::vector<MixedSample>& samples) {
    EncodedDataset out;
    out.feature_names = train.feature_names;
    out.scale_params = train.scale_params;
    out.encoder = train.encoder;
    out.warnings = train.warnings;

    auto n = train.features.rows();
    auto m = static_cast<Eigen::Index>(samples.size());
    out.features.resize(n + m, train.features.cols());
    out.labels.resize(n + m);
    out.sensitive.resize(n + m);
    out.features.topRows(n) = train.features;
    out.labels.head(n) = train.labels;
    out.sensitive.head(n) = train.sensitive;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        if (s.features.size() != train.features.cols())
            throw DimensionMismatchError("augment: sample feature width mismatch");
        out.features.row(n + i) = s.features;
        out.labels(n + i) = s.label;
        out.sensitive(n + i) = s.sensitive;
    }
    return out;
}

}  // namespace proximix
