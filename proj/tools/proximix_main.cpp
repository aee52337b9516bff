#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI/CLI.hpp>

#include "proximix/errors.hpp"
#include "proximix/harness.hpp"
#include "proximix/synthetic.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw proximix::IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<double> parse_d_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) throw proximix::ConfigError("bad d value: " + item);
        values.push_back(v);
    }
    if (values.empty()) throw proximix::ConfigError("--d needs at least one value");
    return values;
}

int run_command(const std::string& config_path, const std::string& dataset,
                const std::string& schema, const std::string& model,
                const std::string& strategy, const std::string& d_list, int gen_count,
                long long seed, bool seed_set, bool recourse, const std::string& out) {
    proximix::ExperimentConfig cfg;
    if (!config_path.empty())
        cfg = proximix::ExperimentConfig::from_json(read_file(config_path));

    if (!dataset.empty()) cfg.dataset_path = dataset;
    if (!schema.empty()) cfg.schema_path = schema;
    if (!model.empty() && model != "all")
        cfg.model_families = {proximix::family_by_name(model)};
    if (!strategy.empty() && strategy != "all") cfg.strategies = {strategy};
    if (!d_list.empty()) cfg.d_grid = parse_d_list(d_list);
    if (gen_count >= 0) cfg.gen_count = gen_count;
    if (seed_set) cfg.seed = static_cast<std::uint64_t>(seed);
    if (recourse) cfg.recourse = true;
    if (!out.empty()) cfg.output_dir = out;

    auto results = proximix::run_experiment(cfg);
    proximix::emit_reports(results, cfg.output_dir);

    int failed = 0;
    for (const auto& r : results) {
        if (r.failed()) {
            ++failed;
            std::fprintf(stderr, "cell %s/%s%s failed: %s\n", r.model.c_str(),
                         r.baseline ? "baseline" : r.strategy.c_str(),
                         r.baseline ? "" : (" d=" + std::to_string(r.d)).c_str(),
                         r.error.c_str());
        }
    }
    std::printf("%zu cells -> %s (%d failed)\n", results.size(), cfg.output_dir.c_str(),
                failed);
    return failed > 0 ? 2 : 0;
}

int synth_command(int rows, double bias, long long seed, const std::string& out_dir) {
    proximix::SyntheticSpec spec;
    spec.rows = rows;
    spec.label_bias = bias;
    spec.seed = static_cast<std::uint64_t>(seed);
    proximix::SyntheticData data = proximix::make_biased_dataset(spec);

    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    proximix::write_csv(data.table, (dir / "synth.csv").string());
    data.schema.save((dir / "synth.schema.json").string());
    std::printf("%d rows -> %s/synth.csv (+ synth.schema.json)\n", rows, out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"proximity-aware mixup augmentation sweeps for tabular fairness"};
    app.require_subcommand(1);

    std::string config_path, dataset, schema, model, strategy, d_list, out;
    int gen_count = -1;
    long long seed = 0;
    bool recourse = false;

    CLI::App* run = app.add_subcommand("run", "run an augmentation sweep");
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--dataset", dataset, "CSV data file (overrides config)");
    run->add_option("--schema", schema, "schema JSON file (overrides config)");
    run->add_option("--model", model, "logreg|tree|mlp|all")
        ->check(CLI::IsMember({"logreg", "tree", "mlp", "all"}));
    run->add_option("--strategy", strategy, "strategy name or 'all'");
    run->add_option("--d", d_list, "comma-separated balancing degrees, e.g. 0,0.5,1");
    run->add_option("--gen-count", gen_count, "generated rows per cell (0 = 10% of train)");
    auto* seed_opt = run->add_option("--seed", seed, "master seed");
    run->add_flag("--recourse", recourse, "also compute counterfactual-cost gaps");
    run->add_option("--out", out, "output directory");

    int synth_rows = 2000;
    double synth_bias = 0.35;
    long long synth_seed = 7;
    std::string synth_out = ".";
    CLI::App* synth = app.add_subcommand("synth", "emit the documented biased dataset");
    synth->add_option("--rows", synth_rows, "row count");
    synth->add_option("--bias", synth_bias, "P(positive recorded negative | unprivileged)");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_command(config_path, dataset, schema, model, strategy, d_list,
                               gen_count, seed, seed_opt->count() > 0, recourse, out);
        return synth_command(synth_rows, synth_bias, synth_seed, synth_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
