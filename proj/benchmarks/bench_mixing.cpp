// Microbenchmarks for the hot geometry paths: pairwise distance, proximity
// membership, nearest-neighbour pools, label blending, and full generation.
#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "proximix/dataset.hpp"
#include "proximix/mixing.hpp"
#include "proximix/rng.hpp"

using namespace proximix;

namespace {

EncodedDataset random_data(std::uint64_t seed, int n, int dims) {
    Rng rng(seed);
    EncodedDataset ds;
    ds.features.resize(n, dims);
    ds.labels.resize(n);
    ds.sensitive.resize(n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < dims; ++c) ds.features(r, c) = rng.uniform();
        ds.labels(r) = static_cast<double>(rng.uniform_index(2));
        ds.sensitive(r) = static_cast<int>(rng.uniform_index(2));
    }
    for (int c = 0; c < dims; ++c) {
        std::string name = "f" + std::to_string(c);
        ds.feature_names.push_back(name);
    }
    // make sure every (group, label) subgroup is populated for generate()
    ds.sensitive(0) = 0; ds.labels(0) = 0.0;
    ds.sensitive(1) = 0; ds.labels(1) = 1.0;
    ds.sensitive(2) = 1; ds.labels(2) = 0.0;
    ds.sensitive(3) = 1; ds.labels(3) = 1.0;
    return ds;
}

void bm_distance(benchmark::State& state) {
    const auto dims = static_cast<int>(state.range(0));
    Rng rng(1);
    Eigen::RowVectorXd a(dims), b(dims);
    for (int c = 0; c < dims; ++c) {
        a(c) = rng.uniform();
        b(c) = rng.uniform();
    }
    for (auto _ : state) benchmark::DoNotOptimize(euclidean_distance(a, b));
}
BENCHMARK(bm_distance)->Arg(8)->Arg(32)->Arg(128);

void bm_proximity_set(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    EncodedDataset pool = random_data(2, n, 16);
    Eigen::RowVectorXd x0 = pool.features.row(0);
    Eigen::RowVectorXd x1 = pool.features.row(n / 2);
    double p_dis = euclidean_distance(x0, x1);
    for (auto _ : state) benchmark::DoNotOptimize(proximity_set(x0, pool, p_dis));
}
BENCHMARK(bm_proximity_set)->Arg(256)->Arg(1024)->Arg(4096);

void bm_knn_pool(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    EncodedDataset pool = random_data(3, n, 16);
    Eigen::RowVectorXd x0 = pool.features.row(0);
    for (auto _ : state) benchmark::DoNotOptimize(knn_pool(x0, pool, 25));
}
BENCHMARK(bm_knn_pool)->Arg(256)->Arg(1024)->Arg(4096);

void bm_label_blend(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    EncodedDataset pool = random_data(4, n, 16);
    Eigen::RowVectorXd x0 = pool.features.row(0);
    Eigen::RowVectorXd x1 = pool.features.row(1);
    MixConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(proximix_label(x0, 0.0, x1, 1.0, pool, cfg, 0.4));
}
BENCHMARK(bm_label_blend)->Arg(256)->Arg(1024);

void bm_generate(benchmark::State& state) {
    const auto n = static_cast<int>(state.range(0));
    EncodedDataset train = random_data(5, n, 16);
    SamplingStrategy strategy = strategy_by_name("C2C1p");
    MixConfig cfg;
    cfg.gen_count_m = static_cast<int>(n / 10);
    for (auto _ : state) benchmark::DoNotOptimize(generate(train, strategy, cfg));
}
BENCHMARK(bm_generate)->Unit(benchmark::kMillisecond)->Arg(512)->Arg(2048);

}  // namespace
