#include "proximix/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "proximix/errors.hpp"
#include "proximix/rng.hpp"

namespace proximix {

namespace {

std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
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

}  // namespace

void SyntheticSpec::validate() const {
    if (rows < 1) throw ConfigError("rows must be >= 1");
    if (label_bias < 0.0 || label_bias > 1.0) throw ConfigError("label_bias must be in [0,1]");
}

SyntheticData make_biased_dataset(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(seed_mix(spec.seed));
    static const char* depts[] = {"X", "Y", "Z"};

    SyntheticData out;
    out.table.header = {"group", "dept", "score1", "score2", "outcome"};
    out.table.rows.reserve(static_cast<std::size_t>(spec.rows));
    for (int i = 0; i < spec.rows; ++i) {
        bool privileged = rng.uniform() < 0.5;
        double skill = rng.uniform();
        double score1 = std::clamp(skill + 0.12 * rng.normal(), 0.0, 1.0);
        double score2 = std::clamp(0.6 * skill + 0.4 * rng.uniform(), 0.0, 1.0);
        const char* dept = depts[rng.uniform_index(3)];
        bool merit = skill > 0.5;
        bool outcome = merit;
        if (merit && !privileged && rng.uniform() < spec.label_bias) outcome = false;
        out.table.rows.push_back({privileged ? "A" : "B", dept, fixed6(score1),
                                  fixed6(score2), outcome ? "yes" : "no"});
    }

    out.schema.columns = {{"group", ColumnKind::Categorical},
                          {"dept", ColumnKind::Categorical},
                          {"score1", ColumnKind::Continuous},
                          {"score2", ColumnKind::Continuous},
                          {"outcome", ColumnKind::Categorical}};
    out.schema.label_column = "outcome";
    out.schema.positive_label_value = "yes";
    out.schema.sensitive_column = "group";
    out.schema.privileged_value = "A";
    out.schema.validate();
    return out;
}

std::string csv_text(const RawTable& table) {
    std::string text;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) text += ',';
        text += csv_cell(table.header[c]);
    }
    text += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) text += ',';
            text += csv_cell(row[c]);
        }
        text += '\n';
    }
    return text;
}

void write_csv(const RawTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << csv_text(table);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace proximix
