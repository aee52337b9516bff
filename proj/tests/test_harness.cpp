#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest/doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "proximix/errors.hpp"
#include "proximix/harness.hpp"
#include "proximix/synthetic.hpp"

using namespace proximix;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path dir;

    Workspace() {
        dir = fs::temp_directory_path() /
              ("proximix_harness_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
};

// dataset + schema files for a small synthetic table; returns a ready config
ExperimentConfig small_config(const Workspace& ws, int rows = 240) {
    SyntheticSpec spec;
    spec.rows = rows;
    spec.label_bias = 0.35;
    spec.seed = 11;
    SyntheticData data = make_biased_dataset(spec);
    write_csv(data.table, ws.path("synth.csv"));
    data.schema.save(ws.path("synth.schema.json"));

    ExperimentConfig cfg;
    cfg.dataset_path = ws.path("synth.csv");
    cfg.schema_path = ws.path("synth.schema.json");
    cfg.model_families = {ModelFamily::LogReg};
    cfg.gen_count = 12;
    cfg.seed = 5;
    cfg.output_dir = ws.path("out");
    return cfg;
}

// table with NO unprivileged-positive rows, so the (z=0, y=1) anchor
// subgroup is empty and any strategy anchored there must fail
void write_starved_dataset(const Workspace& ws) {
    RawTable table;
    table.header = {"group", "score", "outcome"};
    for (int i = 0; i < 60; ++i) {
        double v = 0.01 * i;
        std::ostringstream cell;
        cell << v;
        table.rows.push_back({"A", cell.str(), i % 2 == 0 ? "yes" : "no"});
        table.rows.push_back({"B", cell.str(), "no"});
    }
    write_csv(table, ws.path("starved.csv"));

    DatasetSchema schema;
    schema.columns = {{"group", ColumnKind::Categorical},
                      {"score", ColumnKind::Continuous},
                      {"outcome", ColumnKind::Categorical}};
    schema.label_column = "outcome";
    schema.positive_label_value = "yes";
    schema.sensitive_column = "group";
    schema.privileged_value = "A";
    schema.save(ws.path("starved.schema.json"));
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines;
}

}  // namespace

TEST_CASE("grid produces one baseline plus strategy-by-d cells per family") {
    Workspace ws;
    ExperimentConfig cfg = small_config(ws);
    cfg.d_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

    std::vector<ExperimentResult> results = run_experiment(cfg);
    REQUIRE(results.size() == 1 + 4 * 6);

    CHECK(results[0].baseline);
    CHECK(results[0].strategy.empty());
    CHECK(results[0].model == "logreg");
    CHECK(results[0].dataset == "synth");

    std::vector<std::string> names = strategy_names();
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t di = 0; di < 6; ++di) {
            const ExperimentResult& r = results[1 + s * 6 + di];
            CHECK_FALSE(r.baseline);
            CHECK(r.strategy == names[s]);
            CHECK(r.d == cfg.d_grid[di]);
            CHECK(r.augmented_count == 12);
            CHECK(r.error.empty());
        }
}

TEST_CASE("empty d grid runs baselines only") {
    Workspace ws;
    ExperimentConfig cfg = small_config(ws);
    cfg.model_families = {ModelFamily::LogReg, ModelFamily::DecisionTree};
    cfg.d_grid = {};
    std::vector<ExperimentResult> results = run_experiment(cfg);
    REQUIRE(results.size() == 2);
    CHECK(results[0].baseline);
    CHECK(results[1].baseline);
    CHECK(results[0].model == "logreg");
    CHECK(results[1].model == "tree");
}

TEST_CASE("result fields stay in range on a small sweep") {
    Workspace ws;
    ExperimentConfig cfg = small_config(ws);
    cfg.strategies = {"C2C1p"};
    cfg.d_grid = {0.0, 0.5, 1.0};
    cfg.recourse = true;

    std::vector<ExperimentResult> results = run_experiment(cfg);
    REQUIRE(results.size() == 4);
    for (const ExperimentResult& r : results) {
        REQUIRE(r.error.empty());
        CHECK(r.train_size == 168);  // 240 * 0.7
        CHECK(r.fairness.accuracy >= 0.0);
        CHECK(r.fairness.accuracy <= 1.0);
        CHECK(r.fairness.f1 >= 0.0);
        CHECK(r.fairness.f1 <= 1.0);
        CHECK(r.fairness.group0.dp >= 0.0);
        CHECK(r.fairness.group0.dp <= 1.0);
        CHECK(r.fairness.group1.dp >= 0.0);
        CHECK(r.fairness.group1.dp <= 1.0);
        REQUIRE(r.recourse.has_value());
        CHECK(r.recourse->group0.count > 0);
        CHECK(r.recourse->group1.count > 0);
        CHECK(r.recourse->group0.avg >= 0.0);
        CHECK(r.recourse->group1.avg >= 0.0);
        CHECK(r.recourse->delta_avg >= 0.0);
        if (!r.baseline) CHECK(r.augmented_count == 12);
    }
}

TEST_CASE("default generation count is a tenth of the training split") {
    Workspace ws;
    ExperimentConfig cfg = small_config(ws);
    cfg.gen_count = 0;
    cfg.strategies = {"C2C1p"};
    cfg.d_grid = {0.5};
    std::vector<ExperimentResult> results = run_experiment(cfg);
    REQUIRE(results.size() == 2);
    std::size_t expected = static_cast<std::size_t>(
        std::lround(0.1 * static_cast<double>(results[1].train_size)));
    if (expected == 0) expected = 1;
    CHECK(results[1].augmented_count == expected);
}

TEST_CASE("sweeps are reproducible byte for byte") {
    Workspace ws;
    ExperimentConfig cfg = small_config(ws);
    cfg.strategies = {"C1C1p", "C4C3p"};
    cfg.d_grid = {0.3, 0.7};
    std::string first = results_json(run_experiment(cfg));
    std::string second = results_json(run_experiment(cfg));
    CHECK(first == second);
}

TEST_CASE("thread cap does not change the outcome") {
    Workspace ws;
    ExperimentConfig cfg = small_config(ws);
    cfg.strategies = {"C2C1p", "C3C3p"};
    cfg.d_grid = {0.0, 1.0};

    ::setenv("PROXIMIX_THREADS", "1", 1);
    std::string serial = results_json(run_experiment(cfg));
    ::setenv("PROXIMIX_THREADS", "4", 1);
    std::string parallel = results_json(run_experiment(cfg));
    ::unsetenv("PROXIMIX_THREADS");
    CHECK(serial == parallel);
}

TEST_CASE("thread budget reads the environment") {
    ::setenv("PROXIMIX_THREADS", "3", 1);
    CHECK(thread_budget() == 3);
    ::setenv("PROXIMIX_THREADS", "0", 1);
    CHECK(thread_budget() >= 1);  // non-positive values fall back
    ::setenv("PROXIMIX_THREADS", "junk", 1);
    CHECK(thread_budget() >= 1);
    ::unsetenv("PROXIMIX_THREADS");
    CHECK(thread_budget() >= 1);
}

TEST_CASE("results survive a json round trip") {
    Workspace ws;
    ExperimentConfig cfg = small_config(ws);
    cfg.strategies = {"C2C1p"};
    cfg.d_grid = {0.25};
    cfg.recourse = true;
    std::vector<ExperimentResult> results = run_experiment(cfg);
    std::string text = results_json(results);
    std::vector<ExperimentResult> back = results_from_json(text);
    CHECK(results_json(back) == text);
}

TEST_CASE("csv layout is pinned") {
    Workspace ws;
    ExperimentConfig cfg = small_config(ws);
    cfg.strategies = {"C2C1p"};
    cfg.d_grid = {0.5};
    std::vector<ExperimentResult> results = run_experiment(cfg);
    std::string csv = results_csv(results);

    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "dataset,model,strategy,d,baseline,train_size,augmented_count,acc,f1,"
          "dp_diff,dp_ratio,eodds_diff,eodds_ratio,m_f1,m_tpr,m_fpr,f_f1,f_tpr,"
          "f_fpr,m_avg,m_std,f_avg,f_std,delta_avg,delta_std,m_count,f_count,"
          "single_class,error");
    CHECK(count_lines(csv) == static_cast<int>(results.size()) + 1);
}

TEST_CASE("report files land in the output directory") {
    Workspace ws;
    ExperimentConfig cfg = small_config(ws);
    cfg.strategies = {"C2C1p"};
    cfg.d_grid = {0.5};
    std::vector<ExperimentResult> results = run_experiment(cfg);
    emit_reports(results, cfg.output_dir);

    CHECK(fs::exists(fs::path(cfg.output_dir) / "results.json"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "results.csv"));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "summary_synth_logreg.txt"));

    std::ifstream summary(fs::path(cfg.output_dir) / "summary_synth_logreg.txt");
    std::stringstream buf;
    buf << summary.rdbuf();
    CHECK(buf.str().find("baseline") != std::string::npos);
    CHECK(buf.str().find("C2C1p") != std::string::npos);
}

TEST_CASE("a strategy with an empty anchor subgroup fails only its own cells") {
    Workspace ws;
    write_starved_dataset(ws);

    ExperimentConfig cfg;
    cfg.dataset_path = ws.path("starved.csv");
    cfg.schema_path = ws.path("starved.schema.json");
    cfg.model_families = {ModelFamily::LogReg};
    cfg.d_grid = {0.5};
    cfg.gen_count = 5;
    cfg.seed = 9;
    cfg.output_dir = ws.path("out2");

    std::vector<ExperimentResult> results = run_experiment(cfg);
    REQUIRE(results.size() == 5);  // baseline + 4 strategies

    int failed = 0;
    for (const ExperimentResult& r : results) {
        if (r.strategy == "C2C1p") {
            CHECK(r.failed());
            CHECK_FALSE(r.error.empty());
            ++failed;
        } else {
            CHECK(r.error.empty());
        }
    }
    CHECK(failed == 1);

    // failed cells still serialize: json round-trips, csv leaves metrics blank
    std::string text = results_json(results);
    std::vector<ExperimentResult> back = results_from_json(text);
    CHECK(results_json(back) == text);
    CHECK(back[2].failed());

    std::string csv = results_csv(results);
    CHECK(csv.find("C2C1p,0.5,0,") != std::string::npos);
    CHECK(count_lines(csv) == 6);
}

TEST_CASE("config json parsing") {
    SUBCASE("full document") {
        std::string doc = R"({
            "dataset": "data.csv",
            "schema": "schema.json",
            "models": ["logreg", "mlp"],
            "strategies": ["C2C1p"],
            "d_grid": [0.0, 0.5],
            "test_fraction": 0.25,
            "gen_count": 40,
            "seed": 123,
            "recourse": true,
            "out": "sweep",
            "mix": {"alpha": 2.0, "pool_size_k": 10, "min_neighbors": 3}
        })";
        ExperimentConfig cfg = ExperimentConfig::from_json(doc);
        CHECK(cfg.dataset_path == "data.csv");
        CHECK(cfg.schema_path == "schema.json");
        REQUIRE(cfg.model_families.size() == 2);
        CHECK(cfg.model_families[0] == ModelFamily::LogReg);
        CHECK(cfg.model_families[1] == ModelFamily::Mlp);
        CHECK(cfg.strategies == std::vector<std::string>{"C2C1p"});
        CHECK(cfg.d_grid == std::vector<double>{0.0, 0.5});
        CHECK(cfg.test_fraction == 0.25);
        CHECK(cfg.gen_count == 40);
        CHECK(cfg.seed == 123);
        CHECK(cfg.recourse);
        CHECK(cfg.output_dir == "sweep");
        CHECK(cfg.mix.alpha == 2.0);
        CHECK(cfg.mix.pool_size_k == 10);
        CHECK(cfg.mix.min_neighbors == 3);
    }
    SUBCASE("the all keyword expands") {
        std::string doc = R"({"dataset": "d.csv", "schema": "s.json",
                              "models": "all", "strategies": "all"})";
        ExperimentConfig cfg = ExperimentConfig::from_json(doc);
        CHECK(cfg.model_families.size() == 3);
        CHECK(cfg.strategies == strategy_names());
    }
    SUBCASE("defaults fill unspecified fields") {
        std::string doc = R"({"dataset": "d.csv", "schema": "s.json"})";
        ExperimentConfig cfg = ExperimentConfig::from_json(doc);
        CHECK(cfg.test_fraction == 0.3);
        CHECK(cfg.gen_count == 0);
        CHECK(cfg.seed == 42);
        CHECK_FALSE(cfg.recourse);
        CHECK(cfg.d_grid.size() == 11);
        CHECK(cfg.model_families.size() == 3);
    }
    SUBCASE("malformed json is rejected") {
        CHECK_THROWS_AS(ExperimentConfig::from_json("{nope"), ConfigError);
    }
    SUBCASE("validation failures") {
        ExperimentConfig cfg;
        cfg.dataset_path = "d.csv";
        cfg.schema_path = "s.json";
        cfg.test_fraction = 0.0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.test_fraction = 0.3;
        cfg.strategies = {"bogus"};
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.strategies = strategy_names();
        cfg.d_grid = {1.5};
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.d_grid = {0.5};
        cfg.dataset_path = "";
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_CASE("default d grid spans zero to one in tenths") {
    std::vector<double> grid = default_d_grid();
    REQUIRE(grid.size() == 11);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(grid[i] == doctest::Approx(0.1 * static_cast<double>(i)).epsilon(1e-12));
}
