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
 * Hit selection and directed doublet-graph construction.
 */
#pragma once

#include "qgnn/events.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace qgnn::graphs {

struct CutConfig {
    double pt_min = 1.0;          ///< GeV
    double phi_slope_max = 6e-4;  ///< rad / mm
    double z0_max = 100.0;        ///< mm
    /// Barrel (volume_id, layer_id) pairs in order of increasing radius;
    /// position in this list is the layer_index.
    std::vector<std::pair<int, int>> barrel_layers{{8, 2},  {8, 4},  {8, 6},  {8, 8},  {13, 2},
                                                   {13, 4}, {13, 6}, {13, 8}, {17, 2}, {17, 4}};

    /// Thresholds must be > 0; `allow_zero` admits the degenerate all-closed cuts.
    void validate(bool allow_zero = false) const;
};

/**
 * Sparse binary (n_nodes x n_edges) incidence matrix with exactly one
 * nonzero per column, stored as the row index of each column plus a
 * row-major edge list for the transpose.
 */
class Incidence {
  public:
    Incidence() = default;
    Incidence(std::size_t n_nodes, std::vector<std::uint32_t> node_of_edge);

    [[nodiscard]] std::size_t rows() const { return n_nodes_; }
    [[nodiscard]] std::size_t cols() const { return node_of_edge_.size(); }
    /// Row index j with R[j, k] = 1.
    [[nodiscard]] std::uint32_t node_of(std::size_t edge) const { return node_of_edge_[edge]; }
    [[nodiscard]] std::span<const std::uint32_t> node_of_edge() const { return node_of_edge_; }
    /// Columns k with R[j, k] = 1, increasing.
    [[nodiscard]] std::span<const std::uint32_t> edges_of(std::size_t node) const;
    [[nodiscard]] double at(std::size_t node, std::size_t edge) const {
        return node_of_edge_[edge] == node ? 1.0 : 0.0;
    }
    /// Dense row-major copy (tests only).
    [[nodiscard]] std::vector<double> to_dense() const;

  private:
    std::size_t n_nodes_ = 0;
    std::vector<std::uint32_t> node_of_edge_;
    std::vector<std::uint32_t> row_start_;
    std::vector<std::uint32_t> row_edges_;
};

struct Edge {
    std::uint32_t src; ///< inner-layer node
    std::uint32_t dst; ///< outer-layer node
    auto operator<=>(const Edge &) const = default;
};

struct EventGraph {
    std::int64_t event_id = 0;
    /// n_nodes x 3 row-major (r, phi, z).
    std::vector<double> x;
    std::vector<std::int64_t> hit_id;
    std::vector<int> layer_index;
    std::vector<std::int64_t> particle_id;
    std::vector<Edge> edges;
    Incidence r_in;  ///< R_i: edge k enters node dst_k
    Incidence r_out; ///< R_o: edge k leaves node src_k
    std::vector<std::uint8_t> y;

    [[nodiscard]] std::size_t n_nodes() const { return hit_id.size(); }
    [[nodiscard]] std::size_t n_edges() const { return edges.size(); }
};

struct GraphStats {
    std::size_t n_nodes = 0;
    std::size_t n_edges = 0;
    double truth_fraction = 0.0;
    bool empty = false; ///< no edges; truth_fraction reported as 0
};

struct PairFeatures {
    double phi_slope;
    double z0;
};

/**
 * Barrel hits whose parent particle has pt >= pt_min, with layer_index set,
 * sorted by (layer_index, hit_id). Noise hits have no parent and are dropped.
 */
std::vector<events::Hit> select_hits(const events::Event &event, const CutConfig &cuts);

/// phi_slope = wrap(phi2 - phi1) / (r2 - r1), z0 = z1 - r1 (z2 - z1) / (r2 - r1).
PairFeatures pair_features(const events::Hit &inner, const events::Hit &outer);

/**
 * Nodes are the hits in input order. Edges join every adjacent-layer pair
 * passing |phi_slope| < phi_slope_max and |z0| < z0_max, directed inner to
 * outer, sorted lexicographically by (src, dst).
 */
EventGraph build_graph(std::span<const events::Hit> hits, const CutConfig &cuts,
                       std::int64_t event_id = 0);

/// Rebuilds R_i / R_o (and nothing else) from the edge list.
void rebuild_incidence(EventGraph &graph);

GraphStats graph_stats(const EventGraph &graph);

/**
 * Two-table columnar format: "<stem>-nodes.csv" (node,hit_id,r,phi,z,layer,
 * particle_id) and "<stem>-edges.csv" (edge,src,dst,y).
 */
void write_graph(const EventGraph &graph, const std::filesystem::path &stem);
EventGraph read_graph(const std::filesystem::path &stem);

} // namespace qgnn::graphs
