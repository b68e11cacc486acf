#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "medguard/core/dataset.hpp"
#include "medguard/core/split.hpp"
#include "medguard/nn/adam.hpp"
#include "medguard/nn/bilstm.hpp"

namespace medguard {

struct TrainConfig {
    double learning_rate = 0.001;
    std::size_t batch_size = 64;
    std::size_t epochs = 100;
    double dropout = 0.5;
    std::size_t units_per_layer = 128;
    std::size_t num_layers = 3;
    std::uint64_t seed = 0;
    std::size_t sequence_chunks = 8;
    double validation_fraction = 0.2;  // carved from the training data for the curves
    double grad_clip_norm = 5.0;

    void validate() const {
        if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
        if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
        if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must lie in [0,1)");
        if (units_per_layer == 0 || num_layers == 0)
            throw std::invalid_argument("units_per_layer and num_layers must be positive");
        if (sequence_chunks == 0) throw std::invalid_argument("sequence_chunks must be positive");
        if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
            throw std::invalid_argument("validation_fraction must lie in [0,1)");
    }
};

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    BiLstmModel model;
    std::vector<EpochStats> curves;
};

namespace detail {

inline std::pair<double, double> evaluate_set(const BiLstmModel& model, const Dataset& d, Rng& rng) {
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (const auto& row : d.rows) {
        const auto cache = forward(model, fold_sequence(row.features, model.sequence_chunks), false, rng);
        loss_sum += loss(cache.probs, row.label);
        std::size_t arg = 0;
        for (std::size_t k = 1; k < cache.probs.size(); ++k)
            if (cache.probs[k] > cache.probs[arg]) arg = k;
        if (static_cast<int>(arg) == row.label) ++correct;
    }
    const auto n = static_cast<double>(d.rows.size());
    return {loss_sum / n, static_cast<double>(correct) / n};
}

}  // namespace detail

// Mini-batch Adam training over shuffled epochs. Per-epoch train metrics are
// running tallies from the training passes (dropout active); validation
// metrics come from an eval-mode pass over the held-out slice at epoch end.
// Fully deterministic under cfg.seed.
inline TrainResult train(const Dataset& d, const FeatureMask& mask, const TrainConfig& cfg) {
    cfg.validate();
    if (!d.normalized) throw std::invalid_argument("train expects a normalized dataset");
    if (d.rows.empty()) throw std::invalid_argument("train: empty dataset");

    const Dataset masked = apply_mask(d, mask);
    Rng rng(cfg.seed);

    Dataset train_set = masked;
    Dataset val_set;
    if (cfg.validation_fraction > 0.0) {
        auto [tr, va] = stratified_split(masked, cfg.validation_fraction, rng.next_u64());
        train_set = std::move(tr);
        val_set = std::move(va);
    }
    if (val_set.rows.empty()) val_set = train_set;

    TrainResult result;
    result.model = init_bilstm(masked.feature_count(), cfg.units_per_layer, cfg.num_layers,
                               masked.schema.class_count(), cfg.sequence_chunks, cfg.dropout, rng);
    BiLstmModel& model = result.model;

    std::vector<std::size_t> order(train_set.rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    AdamState adam = AdamState::like(model);
    std::size_t step = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            BiLstmModel grads = zeros_like(model);
            for (std::size_t i = start; i < end; ++i) {
                const Row& row = train_set.rows[order[i]];
                const auto cache = forward(model, fold_sequence(row.features, cfg.sequence_chunks), true, rng);
                loss_sum += loss(cache.probs, row.label);
                std::size_t arg = 0;
                for (std::size_t k = 1; k < cache.probs.size(); ++k)
                    if (cache.probs[k] > cache.probs[arg]) arg = k;
                if (static_cast<int>(arg) == row.label) ++correct;

                const BiLstmModel example_grads = backward(model, cache, row.label);
                auto acc = parameter_tensors(grads);
                auto add = parameter_tensors(const_cast<BiLstmModel&>(example_grads));
                for (std::size_t tns = 0; tns < acc.size(); ++tns) add_to(*acc[tns], *add[tns]);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            for (auto* t : parameter_tensors(grads))
                for (double& v : *t) v *= inv;
            clip_gradients(grads, cfg.grad_clip_norm);
            adam_step(model, grads, adam, cfg.learning_rate, ++step);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(order.size());
        stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
        const auto [vl, va] = detail::evaluate_set(model, val_set, rng);
        stats.val_loss = vl;
        stats.val_accuracy = va;
        result.curves.push_back(stats);
    }
    return result;
}

struct Prediction {
    int label = 0;
    Vector probabilities;
};

// Eval-mode inference; argmax ties break toward the lower class index.
inline std::vector<Prediction> predict(const BiLstmModel& model, const Dataset& d, const FeatureMask& mask) {
    const Dataset masked = apply_mask(d, mask);
    if (masked.feature_count() != model.input_features)
        throw std::invalid_argument("predict: masked feature count " + std::to_string(masked.feature_count()) +
                                    " does not match model input " + std::to_string(model.input_features));
    Rng rng(0);  // eval mode draws nothing
    std::vector<Prediction> out;
    out.reserve(masked.rows.size());
    for (const auto& row : masked.rows) {
        auto cache = forward(model, fold_sequence(row.features, model.sequence_chunks), false, rng);
        Prediction p;
        std::size_t arg = 0;
        for (std::size_t k = 1; k < cache.probs.size(); ++k)
            if (cache.probs[k] > cache.probs[arg]) arg = k;
        p.label = static_cast<int>(arg);
        p.probabilities = std::move(cache.probs);
        out.push_back(std::move(p));
    }
    return out;
}

// Single-vector convenience used by the agent's phase 3.
inline Prediction predict_one(const BiLstmModel& model, const Vector& masked_features) {
    if (masked_features.size() != model.input_features)
        throw std::invalid_argument("predict_one: feature count does not match model input");
    Rng rng(0);
    auto cache = forward(model, fold_sequence(masked_features, model.sequence_chunks), false, rng);
    Prediction p;
    std::size_t arg = 0;
    for (std::size_t k = 1; k < cache.probs.size(); ++k)
        if (cache.probs[k] > cache.probs[arg]) arg = k;
    p.label = static_cast<int>(arg);
    p.probabilities = std::move(cache.probs);
    return p;
}

}  // namespace medguard
