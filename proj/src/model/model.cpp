// Copyright 2026 The qgnn-tracking Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qgnn/model.hpp"

#include "json.hpp"

#include <numbers>
#include <stdexcept>

namespace qgnn::model {

namespace {

constexpr std::array<std::pair<VariantKind, std::string_view>, 5> kVariantNames{{
    {VariantKind::original_cgnn, "original_cgnn"},
    {VariantKind::original_qgnn, "original_qgnn"},
    {VariantKind::upgraded_cgnn, "upgraded_cgnn"},
    {VariantKind::upgraded_qgnn, "upgraded_qgnn"},
    {VariantKind::parallel_qgnn, "parallel_qgnn"},
}};

bool is_original(VariantKind k) {
    return k == VariantKind::original_cgnn || k == VariantKind::original_qgnn;
}

} // namespace

VariantKind parse_variant(std::string_view name) {
    for (const auto &[kind, text] : kVariantNames) {
        if (text == name) {
            return kind;
        }
    }
    throw std::invalid_argument("unknown model variant '" + std::string(name) + "'");
}

std::string_view to_string(VariantKind kind) {
    for (const auto &[k, text] : kVariantNames) {
        if (k == kind) {
            return text;
        }
    }
    return "?";
}

bool ModelVariant::is_quantum() const {
    return kind == VariantKind::original_qgnn || kind == VariantKind::upgraded_qgnn ||
           kind == VariantKind::parallel_qgnn;
}

quantum::EncodingKind ModelVariant::encoding() const {
    switch (kind) {
    case VariantKind::original_qgnn:
        return quantum::EncodingKind::angle;
    case VariantKind::parallel_qgnn:
        return quantum::EncodingKind::parallel;
    default:
        return quantum::EncodingKind::amplitude;
    }
}

std::size_t ModelVariant::n_qubits() const {
    return is_quantum() ? quantum::encoded_qubits(encoding(), hidden_dim) : 0;
}

ModelVariant ModelVariant::make(VariantKind kind) {
    ModelVariant v;
    v.kind = kind;
    if (is_original(kind)) {
        v.hidden_dim = 4;
        v.residual = false;
        v.readout = quantum::ReadoutKind::z;
    }
    return v;
}

BlockSpec make_block_spec(const ModelVariant &v, bool is_edge) {
    const std::size_t d = v.hidden_dim;
    const std::size_t fan_in = (is_edge ? 2 : 3) * d + (!is_edge && v.residual ? d : 0);
    BlockSpec b;
    b.output_dim = is_edge ? 1 : d;
    if (v.residual) {
        b.encoder.widths = {fan_in, d, d};
    } else {
        b.encoder.widths = {fan_in, d};
    }
    b.encoder.hidden = ad::Activation::tanh;
    b.encoder.output = ad::Activation::tanh;

    std::size_t readout_in = d;
    if (v.is_quantum()) {
        auto layer = quantum::make_layer_spec(v.encoding(), d, v.circuit_layers, v.readout);
        layer.bypass_circuit = v.bypass_circuit;
        readout_in = layer.output_width();
        if (layer.encoding == quantum::EncodingKind::angle) {
            b.angle_scale = std::numbers::pi;
        }
        if (layer.readout == quantum::ReadoutKind::probs && v.rescale_probs) {
            b.readout_scale = static_cast<double>(readout_in);
        }
        b.circuit = std::move(layer);
    }
    b.readout.widths = {readout_in, b.output_dim};
    b.readout.hidden = ad::Activation::tanh;
    b.readout.output = is_edge ? ad::Activation::sigmoid : ad::Activation::tanh;
    return b;
}

ParamCount count_params(const ModelVariant &v) {
    ParamCount c;
    const std::size_t d = v.hidden_dim;
    c.classical = 3 * d + d;
    for (bool is_edge : {true, false}) {
        const auto b = make_block_spec(v, is_edge);
        c.classical += b.encoder.parameter_count() + b.readout.parameter_count();
        if (b.circuit) {
            c.quantum += b.circuit->n_params();
        }
    }
    return c;
}

GNN::Block GNN::make_block(const std::string &prefix, bool is_edge, std::mt19937_64 &rng) {
    Block block;
    block.spec = make_block_spec(variant_, is_edge);
    block.encoder = ad::MLP(store_, prefix + ".encoder", block.spec.encoder, rng);
    if (block.spec.circuit) {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        ad::Tensor theta(1, block.spec.circuit->n_params());
        for (double &t : theta.values()) {
            t = angle(rng);
        }
        block.theta = store_.add(prefix + ".circuit.theta", std::move(theta));
    }
    block.readout = ad::MLP(store_, prefix + ".readout", block.spec.readout, rng);
    return block;
}

GNN::GNN(ModelVariant variant, std::uint64_t seed) : variant_{std::move(variant)} {
    if (variant_.hidden_dim == 0) {
        throw std::invalid_argument("hidden_dim must be positive");
    }
    std::mt19937_64 rng(seed);
    input_mlp_ = ad::MLP(store_, "input",
                         ad::MLPSpec{{3, variant_.hidden_dim}, ad::Activation::tanh,
                                     ad::Activation::tanh},
                         rng);
    edge_ = make_block("edge", true, rng);
    node_ = make_block("node", false, rng);
}

ParamCount GNN::count_params() const {
    ParamCount c;
    for (const auto &p : store_) {
        if (p.name.ends_with(".circuit.theta")) {
            c.quantum += p.value.size();
        } else {
            c.classical += p.value.size();
        }
    }
    return c;
}

ad::Tensor GNN::node_features(const graphs::EventGraph &graph) const {
    ad::Tensor x(graph.n_nodes(), 3);
    for (std::size_t i = 0; i < graph.n_nodes(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            x(i, c) = graph.x[3 * i + c] * variant_.feature_scale[c];
        }
    }
    return x;
}

ad::Var GNN::run_block(ad::Tape &tape, const Block &block, ad::Var input,
                       ad::ParamStore &store) {
    ad::Var h = block.encoder.forward(tape, store, input);
    if (block.spec.circuit) {
        if (block.spec.angle_scale != 1.0) {
            h = ad::scale(h, block.spec.angle_scale);
        }
        h = quantum::quantum_layer(h, tape.param(store.at(block.theta)), *block.spec.circuit,
                                   &counters_.circuits);
        if (block.spec.readout_scale != 1.0) {
            h = ad::scale(h, block.spec.readout_scale);
        }
    }
    return block.readout.forward(tape, store, h);
}

ad::Var GNN::input_net(ad::Tape &tape, ad::Var x) { return input_mlp_.forward(tape, store_, x); }

ad::Var GNN::edge_network(ad::Tape &tape, ad::Var h, const graphs::EventGraph &graph,
                          ad::ParamStore *store) {
    ++counters_.edge_blocks;
    ad::Var bo = ad::gather_rows(h, graph.r_out.node_of_edge());
    ad::Var bi = ad::gather_rows(h, graph.r_in.node_of_edge());
    return run_block(tape, edge_, ad::concat_cols({bo, bi}), store ? *store : store_);
}

ad::Var GNN::node_network(ad::Tape &tape, ad::Var h, ad::Var scores,
                          const graphs::EventGraph &graph, ad::Var h0) {
    ++counters_.node_blocks;
    const std::size_t n = graph.n_nodes();
    ad::Var bo = ad::gather_rows(h, graph.r_out.node_of_edge());
    ad::Var bi = ad::gather_rows(h, graph.r_in.node_of_edge());
    // Messages from inner neighbours arrive through R_i, from outer ones through R_o.
    ad::Var m_in = ad::scatter_rows(ad::mul_rows(bo, scores), graph.r_in.node_of_edge(), n);
    ad::Var m_out = ad::scatter_rows(ad::mul_rows(bi, scores), graph.r_out.node_of_edge(), n);
    ad::Var input = variant_.residual ? ad::concat_cols({m_out, m_in, h, h0})
                                      : ad::concat_cols({m_out, m_in, h});
    ad::Var out = run_block(tape, node_, input, store_);
    return variant_.residual ? ad::add(h, out) : out;
}

ad::Var GNN::forward(ad::Tape &tape, const graphs::EventGraph &graph) {
    ad::Var h0 = input_net(tape, tape.constant(node_features(graph)));
    ad::Var h = h0;
    ad::Var e = edge_network(tape, h, graph);
    for (std::size_t it = 0; it < variant_.n_iter; ++it) {
        h = node_network(tape, h, e, graph, h0);
        e = edge_network(tape, h, graph);
    }
    return e;
}

std::vector<double> GNN::predict(const graphs::EventGraph &graph) {
    ad::Tape tape(false);
    const auto &v = forward(tape, graph).value().values();
    return {v.begin(), v.end()};
}

void GNN::zero_node_output_layer() {
    store_.at(node_.readout.last_weight()).value.fill(0.0);
    store_.at(node_.readout.last_bias()).value.fill(0.0);
}

void GNN::reset_counters() {
    counters_.edge_blocks = 0;
    counters_.node_blocks = 0;
    counters_.circuits = 0;
}

std::string GNN::checkpoint_meta() const {
    nlohmann::json meta{
        {"variant", std::string(to_string(variant_.kind))},
        {"hidden_dim", variant_.hidden_dim},
        {"n_iter", variant_.n_iter},
        {"circuit_layers", variant_.circuit_layers},
        {"readout", std::string(quantum::to_string(variant_.readout))},
        {"rescale_probs", variant_.rescale_probs},
        {"bypass_circuit", variant_.bypass_circuit},
        {"feature_scale", variant_.feature_scale},
    };
    return meta.dump();
}

void GNN::save(const std::string &path) const {
    ad::write_checkpoint(path, ad::snapshot(store_, checkpoint_meta()));
}

void GNN::load(const std::string &path) {
    const auto ckpt = ad::read_checkpoint(path);
    const auto meta = nlohmann::json::parse(ckpt.meta_json);
    const std::string want(to_string(variant_.kind));
    const std::string got = meta.value("variant", std::string("<none>"));
    if (got != want) {
        throw std::invalid_argument("checkpoint " + path + " holds variant '" + got +
                                    "', model is '" + want + "'");
    }
    if (meta.contains("feature_scale") &&
        meta["feature_scale"].get<std::array<double, 3>>() != variant_.feature_scale) {
        throw std::invalid_argument("checkpoint " + path + " was trained with feature_scale " +
                                    meta["feature_scale"].dump() + ", model uses " +
                                    nlohmann::json(variant_.feature_scale).dump());
    }
    ad::restore(store_, ckpt);
}

} // namespace qgnn::model
