#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proximix/dataset.hpp"
#include "proximix/metrics.hpp"
#include "proximix/mixing.hpp"
#include "proximix/models.hpp"
#include "proximix/recourse.hpp"

namespace proximix {

// 0.0, 0.1, ..., 1.0
std::vector<double> default_d_grid();

// Grid definition for one sweep: every model family gets a baseline cell
// plus one cell per (strategy, d).
struct ExperimentConfig {
    std::string dataset_path;
    std::string schema_path;
    std::vector<ModelFamily> model_families = {ModelFamily::LogReg, ModelFamily::DecisionTree,
                                               ModelFamily::Mlp};
    std::vector<std::string> strategies = strategy_names();
    std::vector<double> d_grid = default_d_grid();
    MixConfig mix;             // alpha / pool size / credibility knobs; d, M, seed are per cell
    double test_fraction = 0.3;
    int gen_count = 0;         // generated rows per cell; 0 = 10% of the training split
    std::uint64_t seed = 42;
    bool recourse = false;     // also compute counterfactual-cost gaps (slow)
    std::string output_dir = "results";

    void validate() const;
    static ExperimentConfig from_json(const std::string& text);
};

struct ExperimentResult {
    std::string dataset;
    std::string model;
    std::string strategy;  // empty on baseline cells
    double d = 0.0;        // meaningful only when baseline is false
    bool baseline = true;
    std::size_t train_size = 0;
    std::size_t augmented_count = 0;
    std::uint64_t train_seed = 0;
    bool single_class = false;
    GenerationStats stats;
    FairnessReport fairness;
    std::optional<RecourseReport> recourse;
    std::string error;  // nonempty when this cell failed; other fields default

    bool failed() const { return !error.empty(); }
};

// Load -> encode -> split -> (augment ->) train -> evaluate over the whole
// grid. Cells run in parallel (capped by PROXIMIX_THREADS) and are returned
// in grid order regardless of scheduling. A failing cell is recorded via
// its error field; the sweep continues.
std::vector<ExperimentResult> run_experiment(const ExperimentConfig& cfg);

// results.json (full fidelity), results.csv (one row per cell), and one
// plain-text summary per (dataset, model) under output_dir.
void emit_reports(const std::vector<ExperimentResult>& results,
                  const std::string& output_dir);

std::string results_json(const std::vector<ExperimentResult>& results);
std::vector<ExperimentResult> results_from_json(const std::string& text);
std::string results_csv(const std::vector<ExperimentResult>& results);

// PROXIMIX_THREADS when set and positive, else the hardware thread count.
unsigned thread_budget();

}  // namespace proximix
