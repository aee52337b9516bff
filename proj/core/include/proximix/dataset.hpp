#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proximix/schema.hpp"

namespace proximix {

// Cleaned tabular data, cells kept as text until encoding.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t size() const { return rows.size(); }
};

// Fitted encoding layout: categorical levels in order of first appearance,
// min/max per continuous column. Applying it to new rows maps unseen
// categorical values to an all-zero indicator group and clamps continuous
// values into [0, 1].
struct Encoder {
    struct Block {
        std::string column;
        ColumnKind kind = ColumnKind::Categorical;
        std::vector<std::string> values;  // categorical levels
        double min = 0.0;                 // continuous range
        double max = 0.0;

        bool operator==(const Block&) const = default;
    };

    std::vector<Block> blocks;
    std::vector<std::string> label_values;      // observed, size 2
    std::vector<std::string> sensitive_values;  // observed, size 2

    bool operator==(const Encoder&) const = default;

    std::size_t feature_dim() const;
};

struct ScaleParam {
    std::string column;
    double min = 0.0;
    double max = 0.0;
};

// Numeric view of a dataset: one-hot/min-max features, binary-or-soft labels,
// binary sensitive attribute. Immutable after construction; all pipeline
// operations return fresh copies.
struct EncodedDataset {
    Eigen::MatrixXd features;               // N x D
    Eigen::VectorXd labels;                 // N, in [0,1]
    Eigen::VectorXi sensitive;              // N, 0/1
    std::vector<std::string> feature_names; // D, one-hot expanded
    std::vector<ScaleParam> scale_params;   // per kept continuous column
    Encoder encoder;
    std::vector<std::string> warnings;      // e.g. dropped constant columns

    std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

struct SubgroupSelector {
    int z = 0;
    std::optional<int> y;

    bool operator==(const SubgroupSelector&) const = default;
};

// Parses CSV text (RFC 4180 quoting) and projects it onto the schema
// columns, in schema order. Rows with a missing or unparseable cell are
// dropped. Throws MissingColumn when a schema column is absent from the
// header, EmptyAfterCleaning when nothing survives.
RawTable load_csv(const std::string& path, const DatasetSchema& schema);
RawTable parse_csv(const std::string& text, const DatasetSchema& schema);

// One-hot expands categorical columns (indicator per observed value),
// min-max scales continuous columns to [0,1], maps the label cell to 1 iff
// it equals positive_label_value and the sensitive cell to 1 iff it equals
// privileged_value. Constant continuous columns are dropped with a warning.
EncodedDataset encode(const RawTable& raw, const DatasetSchema& schema);

// Encodes with a previously fitted layout (predict-time path).
EncodedDataset encode_with(const RawTable& raw, const DatasetSchema& schema,
                           const Encoder& encoder);

// Inverse of the min-max scaling for one continuous value.
double decode_continuous(const ScaleParam& p, double scaled);

// Deterministic shuffle split; scale_params and encoder are shared.
std::pair<EncodedDataset, EncodedDataset> split(const EncodedDataset& ds,
                                                double test_fraction,
                                                std::uint64_t seed);

// Row indices matching the selector, ascending. Throws EmptySubgroup.
std::vector<std::size_t> subgroup_indices(const EncodedDataset& ds,
                                          const SubgroupSelector& sel);

// Rows matching the selector, original order preserved.
EncodedDataset subgroup(const EncodedDataset& ds, const SubgroupSelector& sel);

// Rows at the given indices, in the given order.
EncodedDataset take_rows(const EncodedDataset& ds,
                         const std::vector<std::size_t>& indices);

}  // namespace proximix
