#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "medguard/core/dataset.hpp"

namespace medguard {

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

// Reads a feature table: one row per line, features in schema order, label
// in the last column. Categorical columns and labels are mapped through the
// schema tables; min/max are computed over the loaded rows.
inline Dataset load_csv(const std::string& path, const FeatureSchema& schema, bool has_header = false) {
    schema.validate();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    Dataset d;
    d.schema = schema;
    const std::size_t expected = schema.feature_count() + 1;

    std::string line;
    std::size_t row_number = 0;
    bool skipped_header = !has_header;
    while (std::getline(in, line)) {
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        if (line.empty()) continue;
        ++row_number;
        const auto fields = detail::split_fields(line);
        if (fields.size() != expected)
            throw std::runtime_error("malformed row " + std::to_string(row_number) + ": expected " +
                                     std::to_string(expected) + " columns, got " + std::to_string(fields.size()));

        Row r;
        r.features.resize(schema.feature_count());
        for (std::size_t col = 0; col < schema.feature_count(); ++col) {
            const std::string& field = fields[col];
            const std::string& name = schema.feature_names[col];
            auto cat = schema.categorical_maps.find(name);
            if (cat != schema.categorical_maps.end()) {
                auto code = cat->second.find(field);
                if (code == cat->second.end())
                    throw std::runtime_error("unknown category '" + field + "' at row " +
                                             std::to_string(row_number) + ", column " + std::to_string(col + 1) +
                                             " (" + name + ")");
                r.features[col] = static_cast<double>(code->second);
            } else {
                double value = 0.0;
                const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
                if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
                    throw std::runtime_error("bad numeric value '" + field + "' at row " +
                                             std::to_string(row_number) + ", column " + std::to_string(col + 1) +
                                             " (" + name + ")");
                r.features[col] = value;
            }
        }
        auto label = schema.label_map.find(fields.back());
        if (label == schema.label_map.end())
            throw std::runtime_error("unknown label '" + fields.back() + "' at row " + std::to_string(row_number));
        r.label = label->second;
        d.rows.push_back(std::move(r));
    }
    recompute_minmax(d);
    return d;
}

// Inverse of load_csv: categorical codes and labels are written back as
// their schema names, numerics in shortest round-trip decimal form.
inline std::string to_csv(const Dataset& d, bool write_header = false) {
    std::ostringstream out;
    if (write_header) {
        for (const auto& name : d.schema.feature_names) out << name << ',';
        out << "label\n";
    }
    for (const auto& r : d.rows) {
        for (std::size_t col = 0; col < d.feature_count(); ++col) {
            if (d.schema.is_categorical(col))
                out << d.schema.category_name(col, static_cast<int>(r.features[col]));
            else
                out << detail::format_double(r.features[col]);
            out << ',';
        }
        out << d.schema.label_name(r.label) << '\n';
    }
    return out.str();
}

inline void save_csv(const Dataset& d, const std::string& path, bool write_header = false) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << to_csv(d, write_header);
}

}  // namespace medguard
