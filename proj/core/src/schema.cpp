#include "proximix/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "proximix/errors.hpp"

namespace proximix {

namespace {

std::string kind_name(ColumnKind k) {
    return k == ColumnKind::Categorical ? "categorical" : "continuous";
}

ColumnKind kind_from(const std::string& s) {
    if (s == "categorical") return ColumnKind::Categorical;
    if (s == "continuous") return ColumnKind::Continuous;
    throw SchemaError("unknown column kind: " + s);
}

}  // namespace

void DatasetSchema::validate() const {
    if (columns.empty()) throw SchemaError("schema has no columns");
    std::set<std::string> seen;
    for (const auto& c : columns) {
        if (c.name.empty()) throw SchemaError("schema has an unnamed column");
        if (!seen.insert(c.name).second)
            throw SchemaError("duplicate column name: " + c.name);
    }
    auto check_special = [&](const std::string& name, const char* role) {
        int count = 0;
        for (const auto& c : columns) {
            if (c.name != name) continue;
            ++count;
            if (c.kind != ColumnKind::Categorical)
                throw SchemaError(std::string(role) + " column must be categorical: " + name);
        }
        if (count != 1)
            throw SchemaError(std::string(role) + " column not in schema columns: " + name);
    };
    check_special(label_column, "label");
    check_special(sensitive_column, "sensitive");
    if (positive_label_value.empty())
        throw SchemaError("positive_label_value is empty");
    if (privileged_value.empty())
        throw SchemaError("privileged_value is empty");
}

const DatasetSchema::Column& DatasetSchema::column(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return c;
    throw SchemaError("no such column: " + name);
}

std::string DatasetSchema::to_json() const {
    nlohmann::ordered_json j;
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : columns)
        j["columns"].push_back({{"name", c.name}, {"kind", kind_name(c.kind)}});
    j["label_column"] = label_column;
    j["positive_label_value"] = positive_label_value;
    j["sensitive_column"] = sensitive_column;
    j["privileged_value"] = privileged_value;
    return j.dump(2) + "\n";
}

DatasetSchema DatasetSchema::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("schema parse failure: ") + e.what());
    }
    DatasetSchema s;
    try {
        for (const auto& c : j.at("columns"))
            s.columns.push_back({c.at("name").get<std::string>(),
                                 kind_from(c.at("kind").get<std::string>())});
        s.label_column = j.at("label_column").get<std::string>();
        s.positive_label_value = j.at("positive_label_value").get<std::string>();
        s.sensitive_column = j.at("sensitive_column").get<std::string>();
        s.privileged_value = j.at("privileged_value").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("schema field failure: ") + e.what());
    }
    s.validate();
    return s;
}

DatasetSchema DatasetSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

void DatasetSchema::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write schema file: " + path);
    out << to_json();
    if (!out) throw IoError("failed writing schema file: " + path);
}

}  // namespace proximix
