#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "medguard/core/dataset.hpp"
#include "medguard/util/rng.hpp"

namespace medguard {

namespace detail {

inline std::vector<std::vector<std::size_t>> indices_by_class(const Dataset& d) {
    std::vector<std::vector<std::size_t>> groups(d.schema.class_count());
    for (std::size_t i = 0; i < d.rows.size(); ++i)
        groups.at(static_cast<std::size_t>(d.rows[i].label)).push_back(i);
    return groups;
}

}  // namespace detail

// Class-stratified holdout split. Test takes round(fraction * class_size)
// rows of each class; row order within each part follows the source dataset.
inline std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must lie in (0,1)");
    Rng rng(seed);
    std::vector<std::size_t> test_idx;
    std::vector<std::size_t> train_idx;
    for (auto& group : detail::indices_by_class(d)) {
        if (group.size() < 2)
            throw std::runtime_error("stratified_split requires at least 2 rows per class, got " +
                                     std::to_string(group.size()));
        rng.shuffle(group);
        const auto take = static_cast<std::size_t>(
            std::floor(test_fraction * static_cast<double>(group.size()) + 0.5));
        for (std::size_t i = 0; i < group.size(); ++i)
            (i < take ? test_idx : train_idx).push_back(group[i]);
    }
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    return {select_rows(d, train_idx), select_rows(d, test_idx)};
}

// Stratified k-fold partition. Shuffled class groups are dealt cyclically
// with a carried offset so overall fold sizes differ by at most one.
inline std::vector<std::pair<Dataset, Dataset>> kfold_split(const Dataset& d, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("k must be at least 2");
    if (k > d.rows.size())
        throw std::invalid_argument("k=" + std::to_string(k) + " exceeds row count " +
                                    std::to_string(d.rows.size()));
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next_fold = 0;
    for (auto& group : detail::indices_by_class(d)) {
        rng.shuffle(group);
        for (auto row : group) {
            folds[next_fold].push_back(row);
            next_fold = (next_fold + 1) % k;
        }
    }
    std::vector<std::pair<Dataset, Dataset>> out;
    out.reserve(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> test_idx = folds[f];
        std::vector<std::size_t> train_idx;
        for (std::size_t g = 0; g < k; ++g)
            if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        std::sort(test_idx.begin(), test_idx.end());
        std::sort(train_idx.begin(), train_idx.end());
        out.emplace_back(select_rows(d, train_idx), select_rows(d, test_idx));
    }
    return out;
}

}  // namespace medguard
