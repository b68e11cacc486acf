#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace medguard {

// Column layout of a traffic table: feature names, string->code tables for
// symbolic columns, the label dictionary, and which class counts as "attack"
// for binary scoring.
struct FeatureSchema {
    std::vector<std::string> feature_names;
    std::map<std::string, std::map<std::string, int>> categorical_maps;  // keyed by feature name
    std::map<std::string, int> label_map;
    int positive_class = 1;
    std::optional<int> benign_class;

    std::size_t feature_count() const { return feature_names.size(); }
    std::size_t class_count() const { return label_map.size(); }

    bool is_categorical(std::size_t feature_index) const {
        return categorical_maps.count(feature_names.at(feature_index)) > 0;
    }

    std::string label_name(int code) const {
        for (const auto& [name, c] : label_map)
            if (c == code) return name;
        throw std::runtime_error("no label with code " + std::to_string(code));
    }

    std::string category_name(std::size_t feature_index, int code) const {
        const auto& table = categorical_maps.at(feature_names.at(feature_index));
        for (const auto& [name, c] : table)
            if (c == code) return name;
        throw std::runtime_error("no category with code " + std::to_string(code) + " in feature '" +
                                 feature_names[feature_index] + "'");
    }

    // Benign class: explicit if configured, else a label named normal/benign,
    // else the lone non-positive class of a two-class map.
    int resolve_benign_class() const {
        if (benign_class) return *benign_class;
        for (const auto& [name, code] : label_map) {
            std::string lower = name;
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (lower == "normal" || lower == "benign") return code;
        }
        if (label_map.size() == 2) {
            for (const auto& [name, code] : label_map)
                if (code != positive_class) return code;
        }
        throw std::runtime_error("schema does not identify a benign class; set benign_class");
    }

    void validate() const {
        if (feature_names.empty()) throw std::runtime_error("schema has no features");
        std::set<std::string> seen(feature_names.begin(), feature_names.end());
        if (seen.size() != feature_names.size()) throw std::runtime_error("schema feature names are not unique");
        for (const auto& [feature, table] : categorical_maps) {
            if (!seen.count(feature))
                throw std::runtime_error("categorical map refers to unknown feature '" + feature + "'");
            check_bijection(table, "categorical map for '" + feature + "'");
        }
        if (label_map.size() < 2) throw std::runtime_error("label map must contain at least 2 classes");
        check_bijection(label_map, "label map");
        if (!code_exists(label_map, positive_class))
            throw std::runtime_error("positive_class " + std::to_string(positive_class) + " not in label map");
        if (benign_class && !code_exists(label_map, *benign_class))
            throw std::runtime_error("benign_class " + std::to_string(*benign_class) + " not in label map");
    }

private:
    static bool code_exists(const std::map<std::string, int>& table, int code) {
        for (const auto& [name, c] : table)
            if (c == code) return true;
        return false;
    }

    // Codes must cover 0..k-1 exactly once.
    static void check_bijection(const std::map<std::string, int>& table, const std::string& what) {
        std::set<int> codes;
        for (const auto& [name, code] : table) {
            if (code < 0 || static_cast<std::size_t>(code) >= table.size() || !codes.insert(code).second)
                throw std::runtime_error(what + " is not a bijection onto 0.." + std::to_string(table.size() - 1));
        }
    }
};

inline FeatureSchema schema_from_json(const nlohmann::json& j) {
    FeatureSchema s;
    s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (j.contains("categorical_maps"))
        s.categorical_maps = j.at("categorical_maps").get<std::map<std::string, std::map<std::string, int>>>();
    s.label_map = j.at("label_map").get<std::map<std::string, int>>();
    s.positive_class = j.at("positive_class").get<int>();
    if (j.contains("benign_class")) s.benign_class = j.at("benign_class").get<int>();
    s.validate();
    return s;
}

inline nlohmann::json schema_to_json(const FeatureSchema& s) {
    nlohmann::json j;
    j["feature_names"] = s.feature_names;
    j["categorical_maps"] = s.categorical_maps;
    j["label_map"] = s.label_map;
    j["positive_class"] = s.positive_class;
    if (s.benign_class) j["benign_class"] = *s.benign_class;
    return j;
}

}  // namespace medguard
