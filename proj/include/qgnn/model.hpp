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
/**
 * @file
 * InputNet / Edge Network / Node Network assembly for the five
 * architecture variants.
 *
 * Every block is encoder MLP -> [encoding -> circuit -> readout] -> readout
 * MLP. Classical variants drop the bracketed hop, so a classical block and
 * its quantum counterpart carry the same classical parameters.
 */
#pragma once

#include "qgnn/autodiff.hpp"
#include "qgnn/graphs.hpp"
#include "qgnn/quantum.hpp"

#include <array>
#include <atomic>
#include <optional>
#include <string>
#include <string_view>

namespace qgnn::model {

enum class VariantKind { original_cgnn, original_qgnn, upgraded_cgnn, upgraded_qgnn, parallel_qgnn };

VariantKind parse_variant(std::string_view name);
std::string_view to_string(VariantKind kind);

struct ModelVariant {
    VariantKind kind = VariantKind::upgraded_cgnn;
    std::size_t hidden_dim = 64;
    std::size_t n_iter = 3;
    std::size_t circuit_layers = 3;
    /// Upgraded variants: h' = h + block(.) and H0 joins the node-block input.
    bool residual = true;
    quantum::ReadoutKind readout = quantum::ReadoutKind::probs;
    /// Multiplies probability readouts so the uniform distribution reads 1.
    bool rescale_probs = true;
    /// Replace every circuit with the identity (readout of the encoded state).
    bool bypass_circuit = false;
    /// Fixed scaling of (r, phi, z) before the InputNet.
    std::array<double, 3> feature_scale{1.0 / 1000.0, 1.0 / 3.141592653589793, 1.0 / 1000.0};

    [[nodiscard]] bool is_quantum() const;
    [[nodiscard]] quantum::EncodingKind encoding() const;
    [[nodiscard]] std::size_t n_qubits() const;

    /// Defaults for a variant: d = 4 / 64, angle(4) / amplitude(6) / parallel(12).
    static ModelVariant make(VariantKind kind);
};

struct BlockSpec {
    ad::MLPSpec encoder;
    std::optional<quantum::LayerSpec> circuit;
    ad::MLPSpec readout;
    std::size_t output_dim = 1;
    double angle_scale = 1.0; ///< applied to encoder output before angle encoding
    double readout_scale = 1.0;
};

/// Block layout of the edge (is_edge) or node network for a variant.
BlockSpec make_block_spec(const ModelVariant &variant, bool is_edge);

struct ParamCount {
    std::size_t classical = 0;
    std::size_t quantum = 0;
};

ParamCount count_params(const ModelVariant &variant);

/**
 * One trainable GNN. The edge and node networks each own a single
 * parameter set reused by every application.
 */
class GNN {
  public:
    GNN(ModelVariant variant, std::uint64_t seed);

    [[nodiscard]] const ModelVariant &variant() const { return variant_; }
    ad::ParamStore &params() { return store_; }
    [[nodiscard]] const ad::ParamStore &params() const { return store_; }
    [[nodiscard]] ParamCount count_params() const;

    /// Scaled coordinates -> H0 (N_V x d).
    ad::Var input_net(ad::Tape &tape, ad::Var x);
    /// Edge scores in (0, 1), N_E x 1. `store` substitutes a same-layout
    /// parameter set for this application only.
    ad::Var edge_network(ad::Tape &tape, ad::Var h, const graphs::EventGraph &graph,
                         ad::ParamStore *store = nullptr);
    ad::Var node_network(ad::Tape &tape, ad::Var h, ad::Var scores, const graphs::EventGraph &graph,
                         ad::Var h0);
    /// InputNet -> EN -> (NN -> EN) x n_iter; returns the last EN's scores.
    ad::Var forward(ad::Tape &tape, const graphs::EventGraph &graph);
    /// Forward without gradient recording.
    std::vector<double> predict(const graphs::EventGraph &graph);

    /// Node feature matrix with the fixed coordinate scaling applied.
    [[nodiscard]] ad::Tensor node_features(const graphs::EventGraph &graph) const;

    /// Zero the node network's final dense layer (residual branch becomes 0).
    void zero_node_output_layer();

    struct Counters {
        std::size_t edge_blocks = 0;
        std::size_t node_blocks = 0;
        std::atomic<std::size_t> circuits{0};
    };
    Counters &counters() { return counters_; }
    void reset_counters();

    [[nodiscard]] std::string checkpoint_meta() const;
    void save(const std::string &path) const;
    /// Throws if the checkpoint was written for a different variant.
    void load(const std::string &path);

  private:
    struct Block {
        BlockSpec spec;
        ad::MLP encoder;
        ad::MLP readout;
        std::size_t theta = 0;
    };

    Block make_block(const std::string &prefix, bool is_edge, std::mt19937_64 &rng);
    ad::Var run_block(ad::Tape &tape, const Block &block, ad::Var input, ad::ParamStore &store);

    ModelVariant variant_;
    ad::ParamStore store_;
    ad::MLP input_mlp_;
    Block edge_;
    Block node_;
    Counters counters_;
};

} // namespace qgnn::model
