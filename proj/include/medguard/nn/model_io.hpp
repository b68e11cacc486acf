#pragma once

#include <string>

#include <json.hpp>

#include "medguard/nn/bilstm.hpp"
#include "medguard/nn/train.hpp"

namespace medguard {

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.data = j.at("data").get<Vector>();
    if (m.data.size() != m.rows * m.cols) throw std::runtime_error("model file: matrix data does not match shape");
    return m;
}

inline nlohmann::json gate_to_json(const GateParams& g) {
    return {{"w", matrix_to_json(g.w)}, {"r", matrix_to_json(g.r)}, {"b", g.b}};
}

inline GateParams gate_from_json(const nlohmann::json& j) {
    return {matrix_from_json(j.at("w")), matrix_from_json(j.at("r")), j.at("b").get<Vector>()};
}

inline nlohmann::json cell_to_json(const LstmCellParams& c) {
    return {{"input_gate", gate_to_json(c.input_gate)},
            {"forget_gate", gate_to_json(c.forget_gate)},
            {"cell_gate", gate_to_json(c.cell_gate)},
            {"output_gate", gate_to_json(c.output_gate)}};
}

inline LstmCellParams cell_from_json(const nlohmann::json& j) {
    return {gate_from_json(j.at("input_gate")), gate_from_json(j.at("forget_gate")),
            gate_from_json(j.at("cell_gate")), gate_from_json(j.at("output_gate"))};
}

}  // namespace detail

inline nlohmann::json model_to_json(const BiLstmModel& m) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : m.layers)
        layers.push_back({{"forward", detail::cell_to_json(layer.forward_cell)},
                          {"backward", detail::cell_to_json(layer.backward_cell)}});
    return {{"format", "medguard-bilstm"},
            {"version", 1},
            {"num_classes", m.num_classes},
            {"dropout_rate", m.dropout_rate},
            {"sequence_chunks", m.sequence_chunks},
            {"chunk_dim", m.chunk_dim},
            {"input_features", m.input_features},
            {"proj", {{"w", detail::matrix_to_json(m.proj_w)}, {"b", m.proj_b}}},
            {"layers", layers},
            {"output",
             {{"q_forward", detail::matrix_to_json(m.out_fwd)},
              {"q_backward", detail::matrix_to_json(m.out_bwd)},
              {"bias", m.out_b}}}};
}

inline BiLstmModel model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "medguard-bilstm") throw std::runtime_error("not a medguard-bilstm model file");
    if (j.value("version", 0) != 1)
        throw std::runtime_error("unsupported model version " + std::to_string(j.value("version", 0)));
    BiLstmModel m;
    m.num_classes = j.at("num_classes").get<std::size_t>();
    m.dropout_rate = j.at("dropout_rate").get<double>();
    m.sequence_chunks = j.at("sequence_chunks").get<std::size_t>();
    m.chunk_dim = j.at("chunk_dim").get<std::size_t>();
    m.input_features = j.at("input_features").get<std::size_t>();
    m.proj_w = detail::matrix_from_json(j.at("proj").at("w"));
    m.proj_b = j.at("proj").at("b").get<Vector>();
    for (const auto& layer : j.at("layers"))
        m.layers.push_back({detail::cell_from_json(layer.at("forward")),
                            detail::cell_from_json(layer.at("backward"))});
    m.out_fwd = detail::matrix_from_json(j.at("output").at("q_forward"));
    m.out_bwd = detail::matrix_from_json(j.at("output").at("q_backward"));
    m.out_b = j.at("output").at("bias").get<Vector>();
    m.validate();
    return m;
}

inline std::string curves_to_csv(const std::vector<EpochStats>& curves) {
    std::string out = "epoch,train_loss,train_acc,val_loss,val_acc\n";
    for (const auto& e : curves) {
        out += std::to_string(e.epoch) + ',' + std::to_string(e.train_loss) + ',' +
               std::to_string(e.train_accuracy) + ',' + std::to_string(e.val_loss) + ',' +
               std::to_string(e.val_accuracy) + '\n';
    }
    return out;
}

}  // namespace medguard
