#include "omniport/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace omniport {

namespace {

using nlohmann::json;

json value_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

double value_from_json(const json& j) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw ParseError("result table: unrecognized value '" + s + "'");
    }
    if (!j.is_number()) throw ParseError("result table: value is not numeric");
    return j.get<double>();
}

}  // namespace

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const SweepTable& table) {
    std::ostringstream out;
    bool first = true;
    for (const auto& ax : table.axes) {
        out << (first ? "" : ",") << (ax.label.empty() ? ax.knob : ax.label);
        first = false;
    }
    for (const auto& c : table.columns) {
        out << (first ? "" : ",") << c;
        first = false;
    }
    out << '\n';

    const std::size_t n0 = table.axes.empty() ? 0 : table.axes[0].values.size();
    const std::size_t n1 =
        table.axes.size() == 2 ? table.axes[1].values.size() : 1;
    for (std::size_t i = 0; i < n0 * n1; ++i) {
        out << format_double(table.axes[0].values[i / n1]);
        if (table.axes.size() == 2)
            out << ',' << format_double(table.axes[1].values[i % n1]);
        for (std::size_t m = 0; m < table.columns.size(); ++m)
            out << ',' << format_double(table.at(i, m));
        out << '\n';
    }
    return out.str();
}

std::string to_json(const SweepTable& table, const std::string& scenario_hash) {
    json doc;
    doc["schema"] = "omniport.table.v1";
    doc["scenario_hash"] = scenario_hash;
    doc["axes"] = json::array();
    for (const auto& ax : table.axes) {
        json a;
        a["knob"] = ax.knob;
        a["label"] = ax.label.empty() ? ax.knob : ax.label;
        a["values"] = json::array();
        for (double v : ax.values) a["values"].push_back(value_to_json(v));
        doc["axes"].push_back(std::move(a));
    }
    doc["columns"] = table.columns;
    doc["records"] = json::array();
    const std::size_t cols = table.columns.size();
    for (std::size_t i = 0; i < table.num_points(); ++i) {
        json row = json::array();
        for (std::size_t m = 0; m < cols; ++m)
            row.push_back(value_to_json(table.at(i, m)));
        doc["records"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

SweepTable table_from_json(const std::string& text, std::string* hash) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("result table: ") + e.what());
    }
    if (!doc.is_object() || doc.value("schema", "") != "omniport.table.v1")
        throw ParseError("result table: missing or unknown schema");
    if (hash) *hash = doc.value("scenario_hash", "");

    SweepTable table;
    for (const auto& a : doc.at("axes")) {
        SweepAxis ax;
        ax.knob = a.value("knob", "");
        ax.label = a.value("label", "");
        for (const auto& v : a.at("values"))
            ax.values.push_back(value_from_json(v));
        table.axes.push_back(std::move(ax));
    }
    for (const auto& c : doc.at("columns"))
        table.columns.push_back(c.get<std::string>());
    const std::size_t expected = table.num_points();
    if (doc.at("records").size() != expected)
        throw ParseError("result table: record count does not match axes");
    for (const auto& row : doc.at("records")) {
        if (row.size() != table.columns.size())
            throw ParseError("result table: ragged record row");
        for (const auto& v : row) table.values.push_back(value_from_json(v));
    }
    return table;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace omniport
