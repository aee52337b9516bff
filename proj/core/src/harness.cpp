#include "proximix/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "proximix/errors.hpp"
#include "proximix/rng.hpp"

namespace proximix {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kTrainStream = 0x747261696eULL;  // "train"

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string csv_cell(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (char c : cell) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

struct Cell {
    ModelFamily family;
    std::size_t family_index = 0;
    bool baseline = true;
    std::size_t strategy_index = 0;
    std::size_t d_index = 0;
};

TrainSpec spec_for(ModelFamily family, std::uint64_t seed) {
    TrainSpec spec;
    spec.family = family;
    spec.seed = seed;
    return spec;
}

json fairness_json(const FairnessReport& r) { return json::parse(r.to_json()); }

json fairness_detail_json(const FairnessReport& r) {
    json d;
    d["precision"] = r.precision;
    d["recall"] = r.recall;
    d["f_dp"] = r.group0.dp;
    d["m_dp"] = r.group1.dp;
    d["dp_ratio_defined"] = r.dp_ratio_defined;
    d["eodds_ratio_defined"] = r.eodds_ratio_defined;
    d["notes"] = r.convention_notes;
    return d;
}

FairnessReport fairness_from_json(const json& f, const json& detail) {
    FairnessReport r;
    r.accuracy = f.at("acc").get<double>();
    r.f1 = f.at("f1").get<double>();
    r.dp_diff = f.at("dp_diff").get<double>();
    r.dp_ratio = f.at("dp_ratio").get<double>();
    r.eodds_diff = f.at("eodds_diff").get<double>();
    r.eodds_ratio = f.at("eodds_ratio").get<double>();
    r.group1.f1 = f.at("m_f1").get<double>();
    r.group1.tpr = f.at("m_tpr").get<double>();
    r.group1.fpr = f.at("m_fpr").get<double>();
    r.group0.f1 = f.at("f_f1").get<double>();
    r.group0.tpr = f.at("f_tpr").get<double>();
    r.group0.fpr = f.at("f_fpr").get<double>();
    r.precision = detail.at("precision").get<double>();
    r.recall = detail.at("recall").get<double>();
    r.group0.dp = detail.at("f_dp").get<double>();
    r.group1.dp = detail.at("m_dp").get<double>();
    r.dp_ratio_defined = detail.at("dp_ratio_defined").get<bool>();
    r.eodds_ratio_defined = detail.at("eodds_ratio_defined").get<bool>();
    r.convention_notes = detail.at("notes").get<std::vector<std::string>>();
    return r;
}

json recourse_json(const RecourseReport& r) { return json::parse(r.to_json()); }

RecourseReport recourse_from_json(const json& j) {
    RecourseReport r;
    r.group1.avg = j.at("m_avg").get<double>();
    r.group1.std = j.at("m_std").get<double>();
    r.group0.avg = j.at("f_avg").get<double>();
    r.group0.std = j.at("f_std").get<double>();
    r.delta_avg = j.at("delta_avg").get<double>();
    r.delta_std = j.at("delta_std").get<double>();
    r.group1.count = j.at("m_count").get<long>();
    r.group0.count = j.at("f_count").get<long>();
    return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::vector<double> default_d_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(static_cast<double>(i) / 10.0);
    return grid;
}

void ExperimentConfig::validate() const {
    if (dataset_path.empty()) throw ConfigError("dataset path is required");
    if (schema_path.empty()) throw ConfigError("schema path is required");
    if (model_families.empty()) throw ConfigError("at least one model family is required");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("test_fraction must be in (0,1)");
    if (gen_count < 0) throw ConfigError("gen_count must be >= 0");
    for (double d : d_grid)
        if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("d grid values must be in [0,1]");
    for (const auto& name : strategies) strategy_by_name(name);  // throws on unknown
    MixConfig probe = mix;
    probe.d = 0.5;
    probe.gen_count_m = 1;
    probe.validate();
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    if (doc.contains("dataset")) cfg.dataset_path = doc["dataset"].get<std::string>();
    if (doc.contains("schema")) cfg.schema_path = doc["schema"].get<std::string>();
    if (doc.contains("models")) {
        const auto& m = doc["models"];
        if (m.is_string()) {
            if (m.get<std::string>() != "all")
                throw ConfigError("models must be \"all\" or a list of family names");
        } else {
            cfg.model_families.clear();
            for (const auto& name : m)
                cfg.model_families.push_back(family_by_name(name.get<std::string>()));
        }
    }
    if (doc.contains("strategies")) {
        const auto& s = doc["strategies"];
        if (s.is_string()) {
            if (s.get<std::string>() != "all")
                throw ConfigError("strategies must be \"all\" or a list of strategy names");
        } else {
            cfg.strategies.clear();
            for (const auto& name : s) cfg.strategies.push_back(name.get<std::string>());
        }
    }
    if (doc.contains("d_grid")) cfg.d_grid = doc["d_grid"].get<std::vector<double>>();
    if (doc.contains("test_fraction")) cfg.test_fraction = doc["test_fraction"].get<double>();
    if (doc.contains("gen_count")) cfg.gen_count = doc["gen_count"].get<int>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("recourse")) cfg.recourse = doc["recourse"].get<bool>();
    if (doc.contains("out")) cfg.output_dir = doc["out"].get<std::string>();
    if (doc.contains("mix")) {
        const auto& m = doc["mix"];
        if (m.contains("alpha")) cfg.mix.alpha = m["alpha"].get<double>();
        if (m.contains("pool_size_k")) cfg.mix.pool_size_k = m["pool_size_k"].get<int>();
        if (m.contains("min_neighbors")) cfg.mix.min_neighbors = m["min_neighbors"].get<int>();
    }
    return cfg;
}

unsigned thread_budget() {
    if (const char* env = std::getenv("PROXIMIX_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::vector<ExperimentResult> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    DatasetSchema schema = DatasetSchema::load(cfg.schema_path);
    RawTable raw = load_csv(cfg.dataset_path, schema);
    EncodedDataset full = encode(raw, schema);
    auto split_pair = split(full, cfg.test_fraction, cfg.seed);
    const EncodedDataset& train_set = split_pair.first;
    const EncodedDataset& test_set = split_pair.second;

    const int gen_count =
        cfg.gen_count > 0
            ? cfg.gen_count
            : std::max(1, static_cast<int>(
                              std::lround(0.1 * static_cast<double>(train_set.size()))));
    const std::string dataset_name = std::filesystem::path(cfg.dataset_path).stem().string();

    // one augmented pool per (strategy, d), shared by every model family
    struct GenSlot {
        std::vector<MixedSample> samples;
        GenerationStats stats;
        std::string error;
    };
    std::vector<GenSlot> gen_slots(cfg.strategies.size() * cfg.d_grid.size());
    {
        std::atomic<std::size_t> next{0};
        auto gen_worker = [&] {
            for (;;) {
                std::size_t at = next.fetch_add(1);
                if (at >= gen_slots.size()) break;
                std::size_t si = at / cfg.d_grid.size();
                std::size_t di = at % cfg.d_grid.size();
                MixConfig mix = cfg.mix;
                mix.d = cfg.d_grid[di];
                mix.gen_count_m = gen_count;
                mix.seed = cfg.seed;
                try {
                    SamplingStrategy strategy = strategy_by_name(cfg.strategies[si]);
                    gen_slots[at].samples =
                        generate(train_set, strategy, mix, &gen_slots[at].stats);
                } catch (const std::exception& e) {
                    gen_slots[at].error = e.what();
                }
            }
        };
        std::size_t workers =
            std::min<std::size_t>(thread_budget(), std::max<std::size_t>(gen_slots.size(), 1));
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(gen_worker);
        for (auto& t : threads) t.join();
    }

    std::vector<Cell> cells;
    for (std::size_t fi = 0; fi < cfg.model_families.size(); ++fi) {
        cells.push_back({cfg.model_families[fi], fi, true, 0, 0});
        for (std::size_t si = 0; si < cfg.strategies.size(); ++si)
            for (std::size_t di = 0; di < cfg.d_grid.size(); ++di)
                cells.push_back({cfg.model_families[fi], fi, false, si, di});
    }

    std::vector<ExperimentResult> results(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t at = next.fetch_add(1);
            if (at >= cells.size()) break;
            const Cell& cell = cells[at];
            ExperimentResult& r = results[at];
            r.dataset = dataset_name;
            r.model = family_name(cell.family);
            r.baseline = cell.baseline;
            r.train_size = train_set.size();
            r.train_seed = seed_combine(seed_combine(cfg.seed, seed_mix(kTrainStream)),
                                        seed_mix(cell.family_index));
            if (!cell.baseline) {
                r.strategy = cfg.strategies[cell.strategy_index];
                r.d = cfg.d_grid[cell.d_index];
            }
            try {
                EncodedDataset augmented;
                const EncodedDataset* train_view = &train_set;
                if (!cell.baseline) {
                    const GenSlot& slot =
                        gen_slots[cell.strategy_index * cfg.d_grid.size() + cell.d_index];
                    if (!slot.error.empty()) throw Error(slot.error);
                    r.stats = slot.stats;
                    r.augmented_count = slot.samples.size();
                    augmented = augment(train_set, slot.samples);
                    train_view = &augmented;
                }
                TrainedModel model = train(*train_view, spec_for(cell.family, r.train_seed));
                r.single_class = model.single_class();
                r.fairness = full_report(model, test_set);
                if (cfg.recourse) r.recourse = group_recourse_report(model, test_set, train_set);
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
    };
    std::size_t workers =
        std::min<std::size_t>(thread_budget(), std::max<std::size_t>(cells.size(), 1));
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    return results;
}

std::string results_json(const std::vector<ExperimentResult>& results) {
    json cells = json::array();
    for (const auto& r : results) {
        json cell;
        cell["dataset"] = r.dataset;
        cell["model"] = r.model;
        if (r.baseline) {
            cell["strategy"] = nullptr;
            cell["d"] = nullptr;
        } else {
            cell["strategy"] = r.strategy;
            cell["d"] = r.d;
        }
        cell["baseline"] = r.baseline;
        cell["train_size"] = r.train_size;
        cell["augmented_count"] = r.augmented_count;
        cell["train_seed"] = r.train_seed;
        cell["single_class"] = r.single_class;
        cell["anchors_drawn"] = r.stats.anchors_drawn;
        cell["credibility_fallbacks"] = r.stats.credibility_fallbacks;
        if (r.failed()) {
            cell["fairness"] = nullptr;
            cell["fairness_detail"] = nullptr;
        } else {
            cell["fairness"] = fairness_json(r.fairness);
            cell["fairness_detail"] = fairness_detail_json(r.fairness);
        }
        cell["recourse"] = r.recourse ? recourse_json(*r.recourse) : json(nullptr);
        cell["error"] = r.failed() ? json(r.error) : json(nullptr);
        cells.push_back(std::move(cell));
    }
    return cells.dump(2) + "\n";
}

std::vector<ExperimentResult> results_from_json(const std::string& text) {
    json doc = json::parse(text);
    std::vector<ExperimentResult> results;
    for (const auto& cell : doc) {
        ExperimentResult r;
        r.dataset = cell.at("dataset").get<std::string>();
        r.model = cell.at("model").get<std::string>();
        r.baseline = cell.at("baseline").get<bool>();
        if (!r.baseline) {
            r.strategy = cell.at("strategy").get<std::string>();
            r.d = cell.at("d").get<double>();
        }
        r.train_size = cell.at("train_size").get<std::size_t>();
        r.augmented_count = cell.at("augmented_count").get<std::size_t>();
        r.train_seed = cell.at("train_seed").get<std::uint64_t>();
        r.single_class = cell.at("single_class").get<bool>();
        r.stats.anchors_drawn = cell.at("anchors_drawn").get<std::size_t>();
        r.stats.credibility_fallbacks = cell.at("credibility_fallbacks").get<std::size_t>();
        if (!cell.at("error").is_null()) r.error = cell.at("error").get<std::string>();
        if (!cell.at("fairness").is_null())
            r.fairness = fairness_from_json(cell.at("fairness"), cell.at("fairness_detail"));
        if (!cell.at("recourse").is_null())
            r.recourse = recourse_from_json(cell.at("recourse"));
        results.push_back(std::move(r));
    }
    return results;
}

std::string results_csv(const std::vector<ExperimentResult>& results) {
    std::string csv =
        "dataset,model,strategy,d,baseline,train_size,augmented_count,"
        "acc,f1,dp_diff,dp_ratio,eodds_diff,eodds_ratio,"
        "m_f1,m_tpr,m_fpr,f_f1,f_tpr,f_fpr,"
        "m_avg,m_std,f_avg,f_std,delta_avg,delta_std,m_count,f_count,"
        "single_class,error\n";
    for (const auto& r : results) {
        std::vector<std::string> fields;
        fields.push_back(csv_cell(r.dataset));
        fields.push_back(csv_cell(r.model));
        fields.push_back(r.baseline ? "" : csv_cell(r.strategy));
        fields.push_back(r.baseline ? "" : num(r.d));
        fields.push_back(r.baseline ? "1" : "0");
        fields.push_back(std::to_string(r.train_size));
        fields.push_back(std::to_string(r.augmented_count));
        if (r.failed()) {
            for (int i = 0; i < 12; ++i) fields.emplace_back();
        } else {
            const FairnessReport& f = r.fairness;
            for (double v : {f.accuracy, f.f1, f.dp_diff, f.dp_ratio, f.eodds_diff,
                             f.eodds_ratio, f.group1.f1, f.group1.tpr, f.group1.fpr,
                             f.group0.f1, f.group0.tpr, f.group0.fpr})
                fields.push_back(num(v));
        }
        if (r.recourse) {
            const RecourseReport& rc = *r.recourse;
            for (double v : {rc.group1.avg, rc.group1.std, rc.group0.avg, rc.group0.std,
                             rc.delta_avg, rc.delta_std})
                fields.push_back(num(v));
            fields.push_back(std::to_string(rc.group1.count));
            fields.push_back(std::to_string(rc.group0.count));
        } else {
            for (int i = 0; i < 8; ++i) fields.emplace_back();
        }
        fields.push_back(r.single_class ? "1" : "0");
        fields.push_back(csv_cell(r.error));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) csv += ',';
            csv += fields[i];
        }
        csv += '\n';
    }
    return csv;
}

void emit_reports(const std::vector<ExperimentResult>& results,
                  const std::string& output_dir) {
    if (results.empty()) throw EmptyInputError("no results to report");
    std::filesystem::path dir(output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + output_dir);

    write_text(dir / "results.json", results_json(results));
    write_text(dir / "results.csv", results_csv(results));

    // one plain-text table per (dataset, model), in first-seen order
    std::vector<std::pair<std::string, std::string>> groups;
    for (const auto& r : results) {
        std::pair<std::string, std::string> key{r.dataset, r.model};
        if (std::find(groups.begin(), groups.end(), key) == groups.end())
            groups.push_back(key);
    }
    for (const auto& [dataset, model] : groups) {
        std::ostringstream text;
        text << dataset << " / " << model << "\n";
        char line[160];
        std::snprintf(line, sizeof(line), "%-16s %8s %8s %8s %8s %10s %11s\n", "cell", "acc",
                      "f1", "dp_diff", "dp_ratio", "eodds_diff", "eodds_ratio");
        text << line;
        for (const auto& r : results) {
            if (r.dataset != dataset || r.model != model) continue;
            std::string name = r.baseline ? "baseline" : r.strategy + " d=" + num(r.d);
            if (r.failed()) {
                std::snprintf(line, sizeof(line), "%-16s failed: %s\n", name.c_str(),
                              r.error.c_str());
                text << line;
                continue;
            }
            std::snprintf(line, sizeof(line), "%-16s %8s %8s %8s %8s %10s %11s\n", name.c_str(),
                          fixed4(r.fairness.accuracy).c_str(), fixed4(r.fairness.f1).c_str(),
                          fixed4(r.fairness.dp_diff).c_str(), fixed4(r.fairness.dp_ratio).c_str(),
                          fixed4(r.fairness.eodds_diff).c_str(),
                          fixed4(r.fairness.eodds_ratio).c_str());
            text << line;
        }
        write_text(dir / ("summary_" + dataset + "_" + model + ".txt"), text.str());
    }
}

}  // namespace proximix
