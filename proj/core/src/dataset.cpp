#include "proximix/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "proximix/errors.hpp"
#include "proximix/rng.hpp"

namespace proximix {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

// RFC 4180: quoted fields may contain commas, newlines and doubled quotes.
std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;

    auto push_field = [&]() {
        record.push_back(field_was_quoted ? field : trim(field));
        field.clear();
        field_was_quoted = false;
    };
    auto push_record = [&]() {
        push_field();
        if (!(record.size() == 1 && record[0].empty()))  // skip blank lines
            records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && trim(field).empty()) {
            quoted = true;
            field_was_quoted = true;
            field.clear();
        } else if (c == ',') {
            push_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            push_record();
        } else {
            field.push_back(c);
        }
    }
    if (!field.empty() || !record.empty()) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        push_record();
    }
    return records;
}

}  // namespace

RawTable parse_csv(const std::string& text, const DatasetSchema& schema) {
    schema.validate();
    auto records = parse_csv_records(text);
    if (records.empty()) throw EmptyAfterCleaningError();

    const auto& header = records.front();
    std::vector<std::size_t> col_pos;
    col_pos.reserve(schema.columns.size());
    for (const auto& col : schema.columns) {
        auto it = std::find(header.begin(), header.end(), col.name);
        if (it == header.end()) throw MissingColumnError(col.name);
        col_pos.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    RawTable table;
    for (const auto& col : schema.columns) table.header.push_back(col.name);

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size()) continue;  // malformed row
        std::vector<std::string> row;
        row.reserve(col_pos.size());
        bool ok = true;
        for (std::size_t c = 0; c < col_pos.size(); ++c) {
            const std::string& cell = rec[col_pos[c]];
            if (is_missing(cell)) {
                ok = false;
                break;
            }
            if (schema.columns[c].kind == ColumnKind::Continuous) {
                double v;
                if (!parse_double(cell, v)) {
                    ok = false;
                    break;
                }
            }
            row.push_back(cell);
        }
        if (ok) table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw EmptyAfterCleaningError();
    return table;
}

RawTable load_csv(const std::string& path, const DatasetSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), schema);
}

std::size_t Encoder::feature_dim() const {
    std::size_t d = 0;
    for (const auto& b : blocks)
        d += b.kind == ColumnKind::Categorical ? b.values.size() : 1;
    return d;
}

namespace {

Encoder fit_encoder(const RawTable& raw, const DatasetSchema& schema,
                    std::vector<std::string>& warnings) {
    Encoder enc;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto& col = schema.columns[c];
        if (col.name == schema.label_column) {
            for (const auto& row : raw.rows) {
                const auto& v = row[c];
                if (std::find(enc.label_values.begin(), enc.label_values.end(), v) ==
                    enc.label_values.end())
                    enc.label_values.push_back(v);
            }
            continue;
        }
        Encoder::Block block;
        block.column = col.name;
        block.kind = col.kind;
        if (col.kind == ColumnKind::Categorical) {
            for (const auto& row : raw.rows) {
                const auto& v = row[c];
                if (std::find(block.values.begin(), block.values.end(), v) ==
                    block.values.end())
                    block.values.push_back(v);
            }
            if (col.name == schema.sensitive_column) enc.sensitive_values = block.values;
        } else {
            block.min = std::numeric_limits<double>::infinity();
            block.max = -std::numeric_limits<double>::infinity();
            for (const auto& row : raw.rows) {
                double v;
                parse_double(row[c], v);
                block.min = std::min(block.min, v);
                block.max = std::max(block.max, v);
            }
            if (block.min == block.max) {
                warnings.push_back("ConstantContinuousColumn(" + col.name +
                                   "): dropped from features");
                continue;
            }
        }
        enc.blocks.push_back(std::move(block));
    }

    if (enc.label_values.size() != 2)
        throw EncodeError("label column must have exactly two observed values, got " +
                          std::to_string(enc.label_values.size()));
    if (enc.sensitive_values.size() != 2)
        throw EncodeError("sensitive column must have exactly two observed values, got " +
                          std::to_string(enc.sensitive_values.size()));
    if (std::find(enc.label_values.begin(), enc.label_values.end(),
                  schema.positive_label_value) == enc.label_values.end())
        throw EncodeError("positive_label_value never observed: " +
                          schema.positive_label_value);
    if (std::find(enc.sensitive_values.begin(), enc.sensitive_values.end(),
                  schema.privileged_value) == enc.sensitive_values.end())
        throw EncodeError("privileged_value never observed: " + schema.privileged_value);
    return enc;
}

EncodedDataset apply_encoder(const RawTable& raw, const DatasetSchema& schema,
                             const Encoder& enc, std::vector<std::string> warnings) {
    const std::size_t n = raw.rows.size();
    const std::size_t dim = enc.feature_dim();

    EncodedDataset ds;
    ds.encoder = enc;
    ds.warnings = std::move(warnings);
    ds.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(dim));
    ds.labels.resize(static_cast<Eigen::Index>(n));
    ds.sensitive.resize(static_cast<Eigen::Index>(n));

    for (const auto& b : enc.blocks) {
        if (b.kind == ColumnKind::Categorical) {
            for (const auto& v : b.values) ds.feature_names.push_back(b.column + "=" + v);
        } else {
            ds.feature_names.push_back(b.column);
            ds.scale_params.push_back({b.column, b.min, b.max});
        }
    }

    std::map<std::string, std::size_t> col_index;
    for (std::size_t c = 0; c < raw.header.size(); ++c) col_index[raw.header[c]] = c;
    std::size_t label_col = col_index.at(schema.label_column);

    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = raw.rows[r];
        Eigen::Index f = 0;
        for (const auto& b : enc.blocks) {
            std::size_t c = col_index.at(b.column);
            if (b.kind == ColumnKind::Categorical) {
                auto it = std::find(b.values.begin(), b.values.end(), row[c]);
                if (it != b.values.end())
                    ds.features(static_cast<Eigen::Index>(r), f + (it - b.values.begin())) = 1.0;
                // unseen value: indicator group stays all-zero
                f += static_cast<Eigen::Index>(b.values.size());
            } else {
                double v;
                parse_double(row[c], v);
                double scaled = (v - b.min) / (b.max - b.min);
                ds.features(static_cast<Eigen::Index>(r), f) = std::clamp(scaled, 0.0, 1.0);
                ++f;
            }
        }
        ds.labels(static_cast<Eigen::Index>(r)) =
            row[label_col] == schema.positive_label_value ? 1.0 : 0.0;
        std::size_t z_col = col_index.at(schema.sensitive_column);
        ds.sensitive(static_cast<Eigen::Index>(r)) =
            row[z_col] == schema.privileged_value ? 1 : 0;
    }
    return ds;
}

}  // namespace

EncodedDataset encode(const RawTable& raw, const DatasetSchema& schema) {
    schema.validate();
    if (raw.rows.empty()) throw EmptyAfterCleaningError();
    if (raw.header.size() != schema.columns.size())
        throw EncodeError("raw table does not match schema column count");
    for (std::size_t c = 0; c < schema.columns.size(); ++c)
        if (raw.header[c] != schema.columns[c].name)
            throw EncodeError("raw table header mismatch at column " + std::to_string(c));

    std::vector<std::string> warnings;
    Encoder enc = fit_encoder(raw, schema, warnings);
    return apply_encoder(raw, schema, enc, std::move(warnings));
}

EncodedDataset encode_with(const RawTable& raw, const DatasetSchema& schema,
                           const Encoder& encoder) {
    schema.validate();
    if (raw.rows.empty()) throw EmptyAfterCleaningError();
    return apply_encoder(raw, schema, encoder, {});
}

double decode_continuous(const ScaleParam& p, double scaled) {
    return p.min + scaled * (p.max - p.min);
}

EncodedDataset take_rows(const EncodedDataset& ds,
                         const std::vector<std::size_t>& indices) {
    EncodedDataset out;
    out.feature_names = ds.feature_names;
    out.scale_params = ds.scale_params;
    out.encoder = ds.encoder;
    out.warnings = ds.warnings;
    out.features.resize(static_cast<Eigen::Index>(indices.size()), ds.features.cols());
    out.labels.resize(static_cast<Eigen::Index>(indices.size()));
    out.sensitive.resize(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto r = static_cast<Eigen::Index>(indices[i]);
        out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(r);
        out.labels(static_cast<Eigen::Index>(i)) = ds.labels(r);
        out.sensitive(static_cast<Eigen::Index>(i)) = ds.sensitive(r);
    }
    return out;
}

std::pair<EncodedDataset, EncodedDataset> split(const EncodedDataset& ds,
                                                double test_fraction,
                                                std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("test_fraction must be in (0, 1)");
    const std::size_t n = ds.size();
    auto test_count = static_cast<std::size_t>(
        std::lround(static_cast<double>(n) * test_fraction));
    test_count = std::min(test_count, n);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed_combine(seed, seed_mix(0x73706c6974ULL)));  // "split" stream
    rng.shuffle(order);

    std::vector<std::size_t> test_idx(order.begin(),
                                      order.begin() + static_cast<std::ptrdiff_t>(test_count));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(test_count),
                                       order.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    return {take_rows(ds, train_idx), take_rows(ds, test_idx)};
}

std::vector<std::size_t> subgroup_indices(const EncodedDataset& ds,
                                          const SubgroupSelector& sel) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto r = static_cast<Eigen::Index>(i);
        if (ds.sensitive(r) != sel.z) continue;
        if (sel.y && ds.labels(r) != static_cast<double>(*sel.y)) continue;
        idx.push_back(i);
    }
    if (idx.empty()) {
        std::string what = "empty subgroup z=" + std::to_string(sel.z);
        if (sel.y) what += " y=" + std::to_string(*sel.y);
        throw EmptySubgroupError(what);
    }
    return idx;
}

EncodedDataset subgroup(const EncodedDataset& ds, const SubgroupSelector& sel) {
    return take_rows(ds, subgroup_indices(ds, sel));
}

}  // namespace proximix
