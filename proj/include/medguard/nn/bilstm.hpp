#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "medguard/nn/lstm.hpp"
#include "medguard/nn/matrix.hpp"
#include "medguard/util/rng.hpp"

namespace medguard {

// A tabular record folded into a fixed-length timestep sequence: the feature
// vector is cut into `chunks` equal slices, zero-padded at the tail.
struct SequenceView {
    std::vector<Vector> steps;

    std::size_t length() const { return steps.size(); }
    std::size_t step_dim() const { return steps.empty() ? 0 : steps.front().size(); }
};

inline SequenceView fold_sequence(const Vector& features, std::size_t chunks) {
    if (chunks == 0) throw std::invalid_argument("fold_sequence: chunks must be positive");
    if (features.empty()) throw std::invalid_argument("fold_sequence: empty feature vector");
    const std::size_t chunk_dim = (features.size() + chunks - 1) / chunks;
    SequenceView seq;
    seq.steps.assign(chunks, Vector(chunk_dim, 0.0));
    for (std::size_t i = 0; i < features.size(); ++i) seq.steps[i / chunk_dim][i % chunk_dim] = features[i];
    return seq;
}

struct DirectionalLayer {
    LstmCellParams forward_cell;
    LstmCellParams backward_cell;
};

// Stacked bidirectional LSTM classifier: rectified dense input projection,
// one forward and one backward cell per layer, and a readout combining the
// two directions' final hidden states followed by softmax.
struct BiLstmModel {
    Matrix proj_w;  // units x chunk_dim
    Vector proj_b;
    std::vector<DirectionalLayer> layers;
    Matrix out_fwd;  // classes x units
    Matrix out_bwd;  // classes x units
    Vector out_b;

    double dropout_rate = 0.5;
    std::size_t num_classes = 2;
    std::size_t sequence_chunks = 8;
    std::size_t chunk_dim = 0;
    std::size_t input_features = 0;

    std::size_t units() const { return proj_b.size(); }

    void validate() const {
        if (layers.empty()) throw std::invalid_argument("model needs at least one layer");
        if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
            throw std::invalid_argument("dropout_rate must lie in [0,1)");
        if (num_classes < 2) throw std::invalid_argument("model needs at least 2 classes");
        if (out_fwd.rows != num_classes || out_bwd.rows != num_classes || out_b.size() != num_classes)
            throw std::invalid_argument("output shapes do not match num_classes");
    }
};

// Uniform +-1/sqrt(fan_in) weights; forget-gate biases start at 1.
inline BiLstmModel init_bilstm(std::size_t input_features, std::size_t units, std::size_t num_layers,
                               std::size_t num_classes, std::size_t sequence_chunks, double dropout_rate,
                               Rng& rng) {
    const auto fill = [&rng](Matrix& m) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(m.cols));
        for (auto& v : m.data) v = rng.next_in(-bound, bound);
    };

    BiLstmModel model;
    model.num_classes = num_classes;
    model.dropout_rate = dropout_rate;
    model.sequence_chunks = sequence_chunks;
    model.input_features = input_features;
    model.chunk_dim = (input_features + sequence_chunks - 1) / sequence_chunks;

    model.proj_w = Matrix(units, model.chunk_dim);
    fill(model.proj_w);
    model.proj_b.assign(units, 0.0);

    const auto make_cell = [&](std::size_t input_dim) {
        LstmCellParams cell;
        for (GateParams* gate : {&cell.input_gate, &cell.forget_gate, &cell.cell_gate, &cell.output_gate}) {
            gate->w = Matrix(units, input_dim);
            fill(gate->w);
            gate->r = Matrix(units, units);
            fill(gate->r);
            gate->b.assign(units, 0.0);
        }
        for (auto& b : cell.forget_gate.b) b = 1.0;
        return cell;
    };

    for (std::size_t l = 0; l < num_layers; ++l) {
        const std::size_t input_dim = l == 0 ? units : 2 * units;
        model.layers.push_back({make_cell(input_dim), make_cell(input_dim)});
    }

    model.out_fwd = Matrix(num_classes, units);
    fill(model.out_fwd);
    model.out_bwd = Matrix(num_classes, units);
    fill(model.out_bwd);
    model.out_b.assign(num_classes, 0.0);
    model.validate();
    return model;
}

// A gradient accumulator has exactly the parameter tree of the model.
inline BiLstmModel zeros_like(const BiLstmModel& m) {
    BiLstmModel z = m;
    std::fill(z.proj_w.data.begin(), z.proj_w.data.end(), 0.0);
    std::fill(z.proj_b.begin(), z.proj_b.end(), 0.0);
    for (auto& layer : z.layers)
        for (LstmCellParams* cell : {&layer.forward_cell, &layer.backward_cell})
            for (GateParams* gate :
                 {&cell->input_gate, &cell->forget_gate, &cell->cell_gate, &cell->output_gate}) {
                std::fill(gate->w.data.begin(), gate->w.data.end(), 0.0);
                std::fill(gate->r.data.begin(), gate->r.data.end(), 0.0);
                std::fill(gate->b.begin(), gate->b.end(), 0.0);
            }
    std::fill(z.out_fwd.data.begin(), z.out_fwd.data.end(), 0.0);
    std::fill(z.out_bwd.data.begin(), z.out_bwd.data.end(), 0.0);
    std::fill(z.out_b.begin(), z.out_b.end(), 0.0);
    return z;
}

// Flat view of every parameter tensor, in one fixed traversal order, so the
// optimizer and clipping walk model/gradient/state trees in lockstep.
inline std::vector<Vector*> parameter_tensors(BiLstmModel& m) {
    std::vector<Vector*> out;
    out.push_back(&m.proj_w.data);
    out.push_back(&m.proj_b);
    for (auto& layer : m.layers)
        for (LstmCellParams* cell : {&layer.forward_cell, &layer.backward_cell})
            for (GateParams* gate :
                 {&cell->input_gate, &cell->forget_gate, &cell->cell_gate, &cell->output_gate}) {
                out.push_back(&gate->w.data);
                out.push_back(&gate->r.data);
                out.push_back(&gate->b);
            }
    out.push_back(&m.out_fwd.data);
    out.push_back(&m.out_bwd.data);
    out.push_back(&m.out_b);
    return out;
}

struct LayerCache {
    std::vector<CellStepCache> fwd;     // scan order t = 0..L-1
    std::vector<CellStepCache> bwd;     // scan order t = L-1..0, indexed by t
    std::vector<Vector> dropout_mask;   // per t, 2*units (inverted dropout scale)
    std::vector<Vector> output;         // per t, concat(fwd_h, bwd_h) after dropout
};

struct ForwardCache {
    SequenceView seq;
    std::vector<Vector> proj_pre;  // per t, before the rectifier
    std::vector<Vector> proj_out;
    std::vector<LayerCache> layers;
    Vector logits;
    Vector probs;
    bool training = false;
};

inline Vector softmax(const Vector& logits) {
    double peak = logits.front();
    for (double v : logits) peak = std::max(peak, v);
    Vector out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - peak);
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

// Cross-entropy against a one-hot target; probability floored at 1e-12.
inline double loss(const Vector& probabilities, int label) {
    const double p = std::max(probabilities.at(static_cast<std::size_t>(label)), 1e-12);
    return -std::log(p);
}

namespace detail {

inline void check_finite(const Vector& v, std::size_t layer, std::size_t t) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::runtime_error("numeric overflow at layer " + std::to_string(layer) + ", timestep " +
                                     std::to_string(t));
}

}  // namespace detail

// Full forward pass. The forward cell scans t = 1..L, the backward cell
// t = L..1; the readout combines the forward final state (last timestep)
// with the backward final state (first timestep). Dropout masks are applied
// to each layer's concatenated output only when training.
inline ForwardCache forward(const BiLstmModel& model, const SequenceView& seq, bool training, Rng& rng) {
    model.validate();
    if (seq.step_dim() != model.chunk_dim || seq.length() != model.sequence_chunks)
        throw std::invalid_argument("sequence shape does not match the model input projection");

    const std::size_t len = seq.length();
    const std::size_t units = model.units();

    ForwardCache cache;
    cache.seq = seq;
    cache.training = training;
    cache.layers.reserve(model.layers.size());

    for (std::size_t t = 0; t < len; ++t) {
        Vector pre = matvec(model.proj_w, seq.steps[t]);
        for (std::size_t k = 0; k < units; ++k) pre[k] += model.proj_b[k];
        Vector post(units);
        for (std::size_t k = 0; k < units; ++k) post[k] = pre[k] > 0.0 ? pre[k] : 0.0;
        cache.proj_pre.push_back(std::move(pre));
        cache.proj_out.push_back(std::move(post));
    }

    const std::vector<Vector>* input = &cache.proj_out;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        LayerCache lc;
        lc.fwd.resize(len);
        lc.bwd.resize(len);

        Vector h(units, 0.0);
        Vector c(units, 0.0);
        for (std::size_t t = 0; t < len; ++t) {
            lc.fwd[t] = cell_step(layer.forward_cell, (*input)[t], h, c);
            detail::check_finite(lc.fwd[t].h, l, t);
            h = lc.fwd[t].h;
            c = lc.fwd[t].c;
        }

        h.assign(units, 0.0);
        c.assign(units, 0.0);
        for (std::size_t t = len; t-- > 0;) {
            lc.bwd[t] = cell_step(layer.backward_cell, (*input)[t], h, c);
            detail::check_finite(lc.bwd[t].h, l, t);
            h = lc.bwd[t].h;
            c = lc.bwd[t].c;
        }

        const double keep = 1.0 - model.dropout_rate;
        lc.dropout_mask.resize(len);
        lc.output.resize(len);
        for (std::size_t t = 0; t < len; ++t) {
            Vector& mask = lc.dropout_mask[t];
            mask.assign(2 * units, 1.0);
            if (training && model.dropout_rate > 0.0)
                for (auto& m : mask) m = rng.next_double() < model.dropout_rate ? 0.0 : 1.0 / keep;
            Vector& out = lc.output[t];
            out.resize(2 * units);
            for (std::size_t k = 0; k < units; ++k) {
                out[k] = lc.fwd[t].h[k] * mask[k];
                out[units + k] = lc.bwd[t].h[k] * mask[units + k];
            }
        }
        cache.layers.push_back(std::move(lc));
        input = &cache.layers.back().output;
    }

    const LayerCache& top = cache.layers.back();
    Vector fwd_final(top.output[len - 1].begin(), top.output[len - 1].begin() + static_cast<long>(units));
    Vector bwd_final(top.output[0].begin() + static_cast<long>(units), top.output[0].end());

    const Vector fwd_part = matvec(model.out_fwd, fwd_final);
    const Vector bwd_part = matvec(model.out_bwd, bwd_final);
    cache.logits.resize(model.num_classes);
    for (std::size_t k = 0; k < model.num_classes; ++k)
        cache.logits[k] = (fwd_part[k] + bwd_part[k]) + model.out_b[k];
    detail::check_finite(cache.logits, model.layers.size(), 0);
    cache.probs = softmax(cache.logits);
    return cache;
}

// Exact reverse accumulation through the readout, both directions of every
// layer, the dropout masks and the rectified projection.
inline BiLstmModel backward(const BiLstmModel& model, const ForwardCache& cache, int label) {
    if (cache.layers.size() != model.layers.size() || cache.probs.size() != model.num_classes)
        throw std::invalid_argument("backward: cache does not match the model");
    if (label < 0 || static_cast<std::size_t>(label) >= model.num_classes)
        throw std::invalid_argument("backward: label out of range");

    const std::size_t len = cache.seq.length();
    const std::size_t units = model.units();
    BiLstmModel grads = zeros_like(model);

    // softmax + cross-entropy collapse to probs - onehot
    Vector dlogits = cache.probs;
    dlogits[static_cast<std::size_t>(label)] -= 1.0;

    const LayerCache& top = cache.layers.back();
    const Vector fwd_final(top.output[len - 1].begin(), top.output[len - 1].begin() + static_cast<long>(units));
    const Vector bwd_final(top.output[0].begin() + static_cast<long>(units), top.output[0].end());

    add_outer(grads.out_fwd, dlogits, fwd_final);
    add_outer(grads.out_bwd, dlogits, bwd_final);
    add_to(grads.out_b, dlogits);

    // gradient w.r.t. each layer's (post-dropout) output sequence
    std::vector<Vector> d_output(len, Vector(2 * units, 0.0));
    {
        Vector d_fwd(units, 0.0);
        add_tmatvec(d_fwd, model.out_fwd, dlogits);
        for (std::size_t k = 0; k < units; ++k) d_output[len - 1][k] += d_fwd[k];
        Vector d_bwd(units, 0.0);
        add_tmatvec(d_bwd, model.out_bwd, dlogits);
        for (std::size_t k = 0; k < units; ++k) d_output[0][units + k] += d_bwd[k];
    }

    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const auto& layer = model.layers[l];
        const auto& lc = cache.layers[l];
        LstmCellParams& gf = grads.layers[l].forward_cell;
        LstmCellParams& gb = grads.layers[l].backward_cell;

        // through the dropout mask onto the raw cell outputs
        std::vector<Vector> d_concat(len);
        for (std::size_t t = 0; t < len; ++t) {
            d_concat[t].resize(2 * units);
            for (std::size_t k = 0; k < 2 * units; ++k) d_concat[t][k] = d_output[t][k] * lc.dropout_mask[t][k];
        }

        const std::size_t input_dim = layer.forward_cell.input_dim();
        std::vector<Vector> d_input(len, Vector(input_dim, 0.0));

        Vector dh_next(units, 0.0);
        Vector dc_next(units, 0.0);
        for (std::size_t t = len; t-- > 0;) {
            Vector dh = dh_next;
            for (std::size_t k = 0; k < units; ++k) dh[k] += d_concat[t][k];
            const CellStepGrads g = cell_step_backward(layer.forward_cell, gf, lc.fwd[t], dh, dc_next);
            add_to(d_input[t], g.dx);
            dh_next = g.dh_prev;
            dc_next = g.dc_prev;
        }

        dh_next.assign(units, 0.0);
        dc_next.assign(units, 0.0);
        for (std::size_t t = 0; t < len; ++t) {
            Vector dh = dh_next;
            for (std::size_t k = 0; k < units; ++k) dh[k] += d_concat[t][units + k];
            const CellStepGrads g = cell_step_backward(layer.backward_cell, gb, lc.bwd[t], dh, dc_next);
            add_to(d_input[t], g.dx);
            dh_next = g.dh_prev;
            dc_next = g.dc_prev;
        }

        if (l > 0) {
            d_output = std::move(d_input);
        } else {
            for (std::size_t t = 0; t < len; ++t) {
                Vector dpre(units);
                for (std::size_t k = 0; k < units; ++k)
                    dpre[k] = cache.proj_pre[t][k] > 0.0 ? d_input[t][k] : 0.0;
                add_outer(grads.proj_w, dpre, cache.seq.steps[t]);
                add_to(grads.proj_b, dpre);
            }
        }
    }
    return grads;
}

}  // namespace medguard
