#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "medguard/core/dataset.hpp"

namespace medguard {

// Small exact k-nearest-neighbor classifier, used as the wrapper surrogate
// for feature-subset fitness. Ties are broken deterministically: equal
// distances prefer the lower train-row index, equal votes the lower class.
inline int knn_predict(const Dataset& train, const std::vector<double>& query, std::size_t k,
                       const std::vector<std::size_t>& columns) {
    if (train.rows.empty()) throw std::runtime_error("knn_predict: empty training set");
    k = std::min(k, train.rows.size());

    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(train.rows.size());
    for (std::size_t i = 0; i < train.rows.size(); ++i) {
        const auto& f = train.rows[i].features;
        double sum = 0.0;
        for (auto c : columns) {
            const double diff = f[c] - query[c];
            sum += diff * diff;
        }
        dist.emplace_back(sum, i);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    std::vector<std::size_t> votes(train.schema.class_count(), 0);
    for (std::size_t i = 0; i < k; ++i) votes[static_cast<std::size_t>(train.rows[dist[i].second].label)]++;
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c)
        if (votes[c] > votes[best]) best = c;
    return static_cast<int>(best);
}

inline double knn_error(const Dataset& train, const Dataset& val, std::size_t k,
                        const std::vector<std::size_t>& columns) {
    if (val.rows.empty()) throw std::runtime_error("knn_error: empty validation set");
    std::size_t wrong = 0;
    for (const auto& r : val.rows)
        if (knn_predict(train, r.features, k, columns) != r.label) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(val.rows.size());
}

}  // namespace medguard
