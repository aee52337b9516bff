// Training and end-to-end sweep benchmarks on the synthetic generator's
// output, sized like the datasets the harness typically sees.
#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>

#include <unistd.h>

#include "proximix/dataset.hpp"
#include "proximix/harness.hpp"
#include "proximix/models.hpp"
#include "proximix/synthetic.hpp"

using namespace proximix;

namespace {

EncodedDataset encoded_synthetic(int rows) {
    SyntheticSpec spec;
    spec.rows = rows;
    spec.seed = 99;
    SyntheticData data = make_biased_dataset(spec);
    return encode(data.table, data.schema);
}

void bm_train_logreg(benchmark::State& state) {
    EncodedDataset data = encoded_synthetic(static_cast<int>(state.range(0)));
    TrainSpec spec;
    spec.family = ModelFamily::LogReg;
    for (auto _ : state) benchmark::DoNotOptimize(train(data, spec));
}
BENCHMARK(bm_train_logreg)->Unit(benchmark::kMillisecond)->Arg(500)->Arg(2000);

void bm_train_tree(benchmark::State& state) {
    EncodedDataset data = encoded_synthetic(static_cast<int>(state.range(0)));
    TrainSpec spec;
    spec.family = ModelFamily::DecisionTree;
    for (auto _ : state) benchmark::DoNotOptimize(train(data, spec));
}
BENCHMARK(bm_train_tree)->Unit(benchmark::kMillisecond)->Arg(500)->Arg(2000);

void bm_train_mlp(benchmark::State& state) {
    EncodedDataset data = encoded_synthetic(static_cast<int>(state.range(0)));
    TrainSpec spec;
    spec.family = ModelFamily::Mlp;
    spec.max_iterations = 50;  // bounded epochs; full training is measured by the sweep
    for (auto _ : state) benchmark::DoNotOptimize(train(data, spec));
}
BENCHMARK(bm_train_mlp)->Unit(benchmark::kMillisecond)->Arg(500);

void bm_sweep_logreg(benchmark::State& state) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() /
                   ("proximix_bench_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    SyntheticSpec spec;
    spec.rows = static_cast<int>(state.range(0));
    spec.seed = 7;
    SyntheticData data = make_biased_dataset(spec);
    write_csv(data.table, (dir / "synth.csv").string());
    data.schema.save((dir / "synth.schema.json").string());

    ExperimentConfig cfg;
    cfg.dataset_path = (dir / "synth.csv").string();
    cfg.schema_path = (dir / "synth.schema.json").string();
    cfg.model_families = {ModelFamily::LogReg};
    cfg.d_grid = {0.0, 0.5, 1.0};

    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg));

    fs::remove_all(dir);
}
BENCHMARK(bm_sweep_logreg)->Unit(benchmark::kMillisecond)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
