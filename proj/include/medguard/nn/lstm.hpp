#pragma once

#include <cmath>
#include <stdexcept>

#include "medguard/nn/matrix.hpp"

namespace medguard {

struct GateParams {
    Matrix w;  // units x input_dim
    Matrix r;  // units x units, recurrent
    Vector b;  // units
};

struct LstmCellParams {
    GateParams input_gate;
    GateParams forget_gate;
    GateParams cell_gate;
    GateParams output_gate;

    std::size_t units() const { return input_gate.b.size(); }
    std::size_t input_dim() const { return input_gate.w.cols; }
};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Everything one timestep computed, kept for reverse accumulation.
struct CellStepCache {
    Vector x;
    Vector h_prev;
    Vector c_prev;
    Vector i, f, g, o;
    Vector c;
    Vector tanh_c;
    Vector h;
};

// One LSTM step: i,f,o logistic gates, tanh candidate,
// c = f.c_prev + i.g, h = o.tanh(c).
inline CellStepCache cell_step(const LstmCellParams& p, const Vector& x, const Vector& h_prev,
                               const Vector& c_prev) {
    const std::size_t u = p.units();
    if (x.size() != p.input_dim() || h_prev.size() != u || c_prev.size() != u)
        throw std::invalid_argument("cell_step: input/state shape mismatch");

    CellStepCache cache;
    cache.x = x;
    cache.h_prev = h_prev;
    cache.c_prev = c_prev;

    const auto gate_pre = [&](const GateParams& g) {
        Vector a = matvec(g.w, x);
        const Vector rec = matvec(g.r, h_prev);
        for (std::size_t k = 0; k < u; ++k) a[k] += rec[k] + g.b[k];
        return a;
    };

    cache.i = gate_pre(p.input_gate);
    cache.f = gate_pre(p.forget_gate);
    cache.g = gate_pre(p.cell_gate);
    cache.o = gate_pre(p.output_gate);
    for (std::size_t k = 0; k < u; ++k) {
        cache.i[k] = logistic(cache.i[k]);
        cache.f[k] = logistic(cache.f[k]);
        cache.g[k] = std::tanh(cache.g[k]);
        cache.o[k] = logistic(cache.o[k]);
    }

    cache.c.resize(u);
    cache.tanh_c.resize(u);
    cache.h.resize(u);
    for (std::size_t k = 0; k < u; ++k) {
        cache.c[k] = cache.f[k] * c_prev[k] + cache.i[k] * cache.g[k];
        cache.tanh_c[k] = std::tanh(cache.c[k]);
        cache.h[k] = cache.o[k] * cache.tanh_c[k];
    }
    return cache;
}

// Reverse-mode step: dh/dc flow in from the step after this one (in scan
// order); returns dx and the state gradients for the step before.
struct CellStepGrads {
    Vector dx;
    Vector dh_prev;
    Vector dc_prev;
};

inline CellStepGrads cell_step_backward(const LstmCellParams& p, LstmCellParams& grads,
                                        const CellStepCache& cache, const Vector& dh, const Vector& dc_in) {
    const std::size_t u = p.units();
    Vector dc(u);
    Vector da_i(u), da_f(u), da_g(u), da_o(u);
    for (std::size_t k = 0; k < u; ++k) {
        const double do_k = dh[k] * cache.tanh_c[k];
        dc[k] = dc_in[k] + dh[k] * cache.o[k] * (1.0 - cache.tanh_c[k] * cache.tanh_c[k]);
        const double di_k = dc[k] * cache.g[k];
        const double df_k = dc[k] * cache.c_prev[k];
        const double dg_k = dc[k] * cache.i[k];
        da_i[k] = di_k * cache.i[k] * (1.0 - cache.i[k]);
        da_f[k] = df_k * cache.f[k] * (1.0 - cache.f[k]);
        da_g[k] = dg_k * (1.0 - cache.g[k] * cache.g[k]);
        da_o[k] = do_k * cache.o[k] * (1.0 - cache.o[k]);
    }

    CellStepGrads out;
    out.dx.assign(p.input_dim(), 0.0);
    out.dh_prev.assign(u, 0.0);
    out.dc_prev.resize(u);
    for (std::size_t k = 0; k < u; ++k) out.dc_prev[k] = dc[k] * cache.f[k];

    const auto pull = [&](const GateParams& gp, GateParams& gg, const Vector& da) {
        add_outer(gg.w, da, cache.x);
        add_outer(gg.r, da, cache.h_prev);
        add_to(gg.b, da);
        add_tmatvec(out.dx, gp.w, da);
        add_tmatvec(out.dh_prev, gp.r, da);
    };
    pull(p.input_gate, grads.input_gate, da_i);
    pull(p.forget_gate, grads.forget_gate, da_f);
    pull(p.cell_gate, grads.cell_gate, da_g);
    pull(p.output_gate, grads.output_gate, da_o);
    return out;
}

}  // namespace medguard
