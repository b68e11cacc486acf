#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "medguard/core/dataset.hpp"
#include "medguard/core/knn.hpp"
#include "medguard/core/split.hpp"
#include "medguard/util/rng.hpp"
#include "medguard/woa/woa.hpp"

namespace medguard {

struct BinaryWoaConfig {
    WoaConfig woa;
    double lambda_weight = 0.99;  // weight on surrogate error rate
    double beta_weight = 0.01;    // weight on subset-size ratio
    std::size_t surrogate_k = 5;  // neighbors for the wrapper classifier
    double validation_fraction = 0.2;

    void validate() const {
        if (lambda_weight < 0.0 || beta_weight < 0.0 || std::abs(lambda_weight + beta_weight - 1.0) > 1e-9)
            throw std::invalid_argument("lambda and beta must be nonnegative and sum to 1");
        if (surrogate_k == 0) throw std::invalid_argument("surrogate_k must be positive");
        if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
            throw std::invalid_argument("validation_fraction must lie in (0,1)");
    }
};

// V-shaped transfer value of a continuous coordinate; |tanh| keeps the
// result in [0,1) so it can act as a probability.
inline double tanh_transfer(double x) { return std::abs(std::tanh(x)); }

// Threshold a continuous position into a mask: bit 0 when rand < |tanh x|,
// bit 1 otherwise. An all-zero outcome is repaired by setting one uniformly
// random bit.
template <RandomSource R>
FeatureMask binarize(const std::vector<double>& position, R& rng) {
    std::vector<std::uint8_t> bits(position.size());
    std::size_t ones = 0;
    for (std::size_t i = 0; i < position.size(); ++i) {
        bits[i] = rng.next_double() < tanh_transfer(position[i]) ? 0 : 1;
        ones += bits[i];
    }
    if (ones == 0) {
        auto pick = static_cast<std::size_t>(rng.next_double() * static_cast<double>(bits.size()));
        bits[std::min(pick, bits.size() - 1)] = 1;
    }
    return FeatureMask(std::move(bits));
}

// Wrapper fitness on a fixed train/validation pair:
// lambda * error_rate + beta * |selected| / |all|.
inline double masked_subset_fitness(const Dataset& train, const Dataset& val, const FeatureMask& m,
                                    const BinaryWoaConfig& cfg) {
    const double err = knn_error(train, val, cfg.surrogate_k, m.selected_indices());
    const double size_ratio = static_cast<double>(m.popcount()) / static_cast<double>(m.size());
    return cfg.lambda_weight * err + cfg.beta_weight * size_ratio;
}

inline double subset_fitness(const Dataset& d, const FeatureMask& m, const BinaryWoaConfig& cfg, Rng& rng) {
    cfg.validate();
    if (m.size() != d.feature_count())
        throw std::invalid_argument("mask length does not match dataset feature count");
    auto [train, val] = stratified_split(d, cfg.validation_fraction, rng.next_u64());
    if (val.rows.empty()) throw std::runtime_error("subset_fitness: validation split is empty");
    return masked_subset_fitness(train, val, m, cfg);
}

struct SelectionResult {
    FeatureMask mask;
    double fitness = 0.0;
    std::vector<double> history;
};

// Binary WOA feature selection: whales move in [-4, 4]^C, every evaluation
// thresholds the continuous position into a mask and scores it with the
// k-NN wrapper on one validation split fixed for the whole run.
inline SelectionResult select_features(const Dataset& d, const BinaryWoaConfig& cfg) {
    cfg.validate();
    if (!d.normalized) throw std::invalid_argument("select_features expects a normalized dataset");
    const std::size_t c = d.feature_count();

    WoaConfig woa_cfg = cfg.woa;
    woa_cfg.dimension = c;
    woa_cfg.bounds.assign(c, Bounds{-4.0, 4.0});

    Rng rng(woa_cfg.seed);
    auto [train, val] = stratified_split(d, cfg.validation_fraction, rng.next_u64());
    if (val.rows.empty()) throw std::runtime_error("select_features: validation split is empty");

    SelectionResult sel;
    bool have_best = false;
    const Objective objective = [&](const std::vector<double>& position) {
        const FeatureMask m = binarize(position, rng);
        const double fit = masked_subset_fitness(train, val, m, cfg);
        if (!have_best || fit < sel.fitness) {
            sel.mask = m;
            sel.fitness = fit;
            have_best = true;
        }
        return fit;
    };

    const WoaResult run = optimize(objective, woa_cfg, rng);
    sel.history = run.history;
    return sel;
}

}  // namespace medguard
