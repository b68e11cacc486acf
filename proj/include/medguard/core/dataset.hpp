#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "medguard/core/schema.hpp"
#include "medguard/util/rng.hpp"

namespace medguard {

// Binary feature-selection mask. Never empty: an all-zero bit vector is
// repaired to select index 0 at construction.
struct FeatureMask {
    std::vector<std::uint8_t> bits;

    FeatureMask() = default;

    explicit FeatureMask(std::vector<std::uint8_t> b) : bits(std::move(b)) {
        if (bits.empty()) throw std::invalid_argument("feature mask must have nonzero length");
        if (popcount() == 0) bits[0] = 1;
    }

    static FeatureMask all_ones(std::size_t n) {
        return FeatureMask(std::vector<std::uint8_t>(n, std::uint8_t{1}));
    }

    std::size_t size() const { return bits.size(); }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (auto b : bits) n += b ? 1 : 0;
        return n;
    }

    std::vector<std::size_t> selected_indices() const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) idx.push_back(i);
        return idx;
    }

    bool operator==(const FeatureMask&) const = default;
};

struct Row {
    std::vector<double> features;
    int label = 0;

    bool operator==(const Row&) const = default;
};

// Immutable after construction; all transforms return new datasets.
struct Dataset {
    FeatureSchema schema;
    std::vector<Row> rows;
    std::vector<double> feature_min;
    std::vector<double> feature_max;
    bool normalized = false;

    std::size_t feature_count() const { return schema.feature_count(); }
    std::size_t row_count() const { return rows.size(); }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(schema.class_count(), 0);
        for (const auto& r : rows) counts.at(static_cast<std::size_t>(r.label))++;
        return counts;
    }
};

inline void recompute_minmax(Dataset& d) {
    const std::size_t c = d.feature_count();
    d.feature_min.assign(c, 0.0);
    d.feature_max.assign(c, 0.0);
    if (d.rows.empty()) return;
    d.feature_min = d.rows.front().features;
    d.feature_max = d.rows.front().features;
    for (const auto& r : d.rows) {
        for (std::size_t i = 0; i < c; ++i) {
            d.feature_min[i] = std::min(d.feature_min[i], r.features[i]);
            d.feature_max[i] = std::max(d.feature_max[i], r.features[i]);
        }
    }
}

// Min-max scaling per feature; constant columns map to 0.
inline Dataset normalize(const Dataset& d) {
    Dataset out = d;
    const std::size_t c = d.feature_count();
    for (auto& r : out.rows) {
        for (std::size_t i = 0; i < c; ++i) {
            const double span = d.feature_max[i] - d.feature_min[i];
            r.features[i] = span == 0.0 ? 0.0 : (r.features[i] - d.feature_min[i]) / span;
        }
    }
    recompute_minmax(out);
    out.normalized = true;
    return out;
}

inline std::vector<double> mask_row(const std::vector<double>& features, const FeatureMask& m) {
    std::vector<double> out;
    out.reserve(m.popcount());
    for (std::size_t i = 0; i < features.size(); ++i)
        if (m.bits[i]) out.push_back(features[i]);
    return out;
}

// Keep only the columns where the mask bit is set; the schema is projected
// onto the surviving features.
inline Dataset apply_mask(const Dataset& d, const FeatureMask& m) {
    if (m.size() != d.feature_count())
        throw std::invalid_argument("mask length " + std::to_string(m.size()) + " does not match feature count " +
                                    std::to_string(d.feature_count()));
    Dataset out;
    out.schema.label_map = d.schema.label_map;
    out.schema.positive_class = d.schema.positive_class;
    out.schema.benign_class = d.schema.benign_class;
    for (std::size_t i = 0; i < d.feature_count(); ++i) {
        if (!m.bits[i]) continue;
        const auto& name = d.schema.feature_names[i];
        out.schema.feature_names.push_back(name);
        auto it = d.schema.categorical_maps.find(name);
        if (it != d.schema.categorical_maps.end()) out.schema.categorical_maps[name] = it->second;
    }
    out.rows.reserve(d.rows.size());
    for (const auto& r : d.rows) out.rows.push_back({mask_row(r.features, m), r.label});
    out.feature_min = mask_row(d.feature_min, m);
    out.feature_max = mask_row(d.feature_max, m);
    out.normalized = d.normalized;
    return out;
}

inline Dataset select_rows(const Dataset& d, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.schema = d.schema;
    out.feature_min = d.feature_min;
    out.feature_max = d.feature_max;
    out.normalized = d.normalized;
    out.rows.reserve(indices.size());
    for (auto i : indices) out.rows.push_back(d.rows.at(i));
    return out;
}

}  // namespace medguard
