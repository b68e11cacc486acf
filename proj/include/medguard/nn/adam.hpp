#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "medguard/nn/bilstm.hpp"

namespace medguard {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

// Bias-corrected Adam on one flat tensor. t is the 1-based step index.
inline void adam_step(Vector& param, const Vector& grad, Vector& m, Vector& v, double lr, std::size_t t) {
    if (param.size() != grad.size() || param.size() != m.size() || param.size() != v.size())
        throw std::invalid_argument("adam_step: state shapes do not match");
    const double correction1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
    const double correction2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * grad[i];
        v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
        const double m_hat = m[i] / correction1;
        const double v_hat = v[i] / correction2;
        param[i] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
    }
}

struct AdamState {
    BiLstmModel m;
    BiLstmModel v;

    static AdamState like(const BiLstmModel& model) { return {zeros_like(model), zeros_like(model)}; }
};

inline void adam_step(BiLstmModel& model, const BiLstmModel& grads, AdamState& state, double lr,
                      std::size_t t) {
    auto params = parameter_tensors(model);
    auto g = parameter_tensors(const_cast<BiLstmModel&>(grads));
    auto m = parameter_tensors(state.m);
    auto v = parameter_tensors(state.v);
    for (std::size_t i = 0; i < params.size(); ++i) adam_step(*params[i], *g[i], *m[i], *v[i], lr, t);
}

// Scale gradients so their global L2 norm does not exceed max_norm.
inline void clip_gradients(BiLstmModel& grads, double max_norm) {
    auto tensors = parameter_tensors(grads);
    double sq = 0.0;
    for (const auto* t : tensors)
        for (double v : *t) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    const double scale = max_norm / norm;
    for (auto* t : tensors)
        for (double& v : *t) v *= scale;
}

}  // namespace medguard
