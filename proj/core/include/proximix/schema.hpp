#pragma once

#include <string>
#include <vector>

namespace proximix {

enum class ColumnKind { Categorical, Continuous };

// Declarative description of a tabular dataset: the columns to keep, which
// one carries the binary label and which one the binary sensitive attribute.
// Columns absent from this list are ignored when loading.
struct DatasetSchema {
    struct Column {
        std::string name;
        ColumnKind kind = ColumnKind::Categorical;

        bool operator==(const Column&) const = default;
    };

    std::vector<Column> columns;
    std::string label_column;
    std::string positive_label_value;
    std::string sensitive_column;
    std::string privileged_value;

    bool operator==(const DatasetSchema&) const = default;

    // Throws SchemaError unless: all names unique, label/sensitive each
    // appear exactly once in columns and are categorical.
    void validate() const;

    const Column& column(const std::string& name) const;

    std::string to_json() const;
    static DatasetSchema from_json(const std::string& text);
    static DatasetSchema load(const std::string& path);
    void save(const std::string& path) const;
};

}  // namespace proximix
