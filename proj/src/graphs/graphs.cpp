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
#include "qgnn/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace qgnn::graphs {

void CutConfig::validate(bool allow_zero) const {
    auto ok = [allow_zero](double v) { return allow_zero ? v >= 0.0 : v > 0.0; };
    if (!ok(pt_min) || !ok(phi_slope_max) || !ok(z0_max)) {
        throw std::invalid_argument("cut thresholds must be strictly positive");
    }
    if (barrel_layers.empty()) {
        throw std::invalid_argument("no barrel layers configured");
    }
}

Incidence::Incidence(std::size_t n_nodes, std::vector<std::uint32_t> node_of_edge)
    : n_nodes_{n_nodes}, node_of_edge_{std::move(node_of_edge)} {
    row_start_.assign(n_nodes_ + 1, 0);
    for (std::uint32_t j : node_of_edge_) {
        if (j >= n_nodes_) {
            throw std::out_of_range("incidence node index out of range");
        }
        ++row_start_[j + 1];
    }
    for (std::size_t j = 0; j < n_nodes_; ++j) {
        row_start_[j + 1] += row_start_[j];
    }
    row_edges_.resize(node_of_edge_.size());
    std::vector<std::uint32_t> fill(row_start_.begin(), row_start_.end() - 1);
    for (std::size_t k = 0; k < node_of_edge_.size(); ++k) {
        row_edges_[fill[node_of_edge_[k]]++] = static_cast<std::uint32_t>(k);
    }
}

std::span<const std::uint32_t> Incidence::edges_of(std::size_t node) const {
    return std::span<const std::uint32_t>(row_edges_).subspan(row_start_[node],
                                                              row_start_[node + 1] - row_start_[node]);
}

std::vector<double> Incidence::to_dense() const {
    std::vector<double> dense(n_nodes_ * cols(), 0.0);
    for (std::size_t k = 0; k < cols(); ++k) {
        dense[node_of_edge_[k] * cols() + k] = 1.0;
    }
    return dense;
}

std::vector<events::Hit> select_hits(const events::Event &event, const CutConfig &cuts) {
    std::map<std::pair<int, int>, int> layer_of;
    for (std::size_t i = 0; i < cuts.barrel_layers.size(); ++i) {
        layer_of.emplace(cuts.barrel_layers[i], static_cast<int>(i));
    }
    std::unordered_map<std::int64_t, double> pt_of;
    for (const auto &p : event.particles) {
        pt_of.emplace(p.particle_id, p.pt());
    }
    std::vector<events::Hit> out;
    for (const auto &h : event.hits) {
        auto layer = layer_of.find({h.volume_id, h.layer_id});
        if (layer == layer_of.end() || h.particle_id == 0) {
            continue;
        }
        auto pt = pt_of.find(h.particle_id);
        if (pt == pt_of.end() || pt->second < cuts.pt_min) {
            continue;
        }
        events::Hit kept = h;
        kept.layer_index = layer->second;
        out.push_back(kept);
    }
    std::sort(out.begin(), out.end(), [](const events::Hit &a, const events::Hit &b) {
        return std::tie(a.layer_index, a.hit_id) < std::tie(b.layer_index, b.hit_id);
    });
    return out;
}

PairFeatures pair_features(const events::Hit &inner, const events::Hit &outer) {
    const double dr = outer.r - inner.r;
    if (!(dr > 0.0)) {
        throw std::invalid_argument("pair_features: outer hit is not at larger radius");
    }
    const double dphi = events::wrap_angle(outer.phi - inner.phi);
    const double dz = outer.z - inner.z;
    return {dphi / dr, inner.z - inner.r * dz / dr};
}

void rebuild_incidence(EventGraph &graph) {
    std::vector<std::uint32_t> dst(graph.edges.size());
    std::vector<std::uint32_t> src(graph.edges.size());
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
        src[k] = graph.edges[k].src;
        dst[k] = graph.edges[k].dst;
    }
    graph.r_in = Incidence(graph.n_nodes(), std::move(dst));
    graph.r_out = Incidence(graph.n_nodes(), std::move(src));
}

EventGraph build_graph(std::span<const events::Hit> hits, const CutConfig &cuts,
                       std::int64_t event_id) {
    EventGraph g;
    g.event_id = event_id;
    const std::size_t n = hits.size();
    g.x.reserve(3 * n);
    int max_layer = -1;
    for (const auto &h : hits) {
        if (h.layer_index < 0) {
            throw std::invalid_argument("build_graph: hit without a layer index (run select_hits first)");
        }
        g.x.insert(g.x.end(), {h.r, h.phi, h.z});
        g.hit_id.push_back(h.hit_id);
        g.layer_index.push_back(h.layer_index);
        g.particle_id.push_back(h.particle_id);
        max_layer = std::max(max_layer, h.layer_index);
    }
    std::vector<std::vector<std::uint32_t>> by_layer(static_cast<std::size_t>(max_layer + 1));
    for (std::size_t i = 0; i < n; ++i) {
        by_layer[static_cast<std::size_t>(hits[i].layer_index)].push_back(static_cast<std::uint32_t>(i));
    }
    for (std::size_t layer = 0; layer + 1 < by_layer.size(); ++layer) {
        for (std::uint32_t a : by_layer[layer]) {
            for (std::uint32_t b : by_layer[layer + 1]) {
                if (!(hits[b].r > hits[a].r)) {
                    continue;
                }
                const PairFeatures f = pair_features(hits[a], hits[b]);
                if (std::abs(f.phi_slope) < cuts.phi_slope_max && std::abs(f.z0) < cuts.z0_max) {
                    g.edges.push_back({a, b});
                }
            }
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.y.reserve(g.edges.size());
    for (const Edge &e : g.edges) {
        const bool same = g.particle_id[e.src] != 0 && g.particle_id[e.src] == g.particle_id[e.dst];
        g.y.push_back(same ? 1 : 0);
    }
    rebuild_incidence(g);
    return g;
}

GraphStats graph_stats(const EventGraph &graph) {
    GraphStats s;
    s.n_nodes = graph.n_nodes();
    s.n_edges = graph.n_edges();
    if (s.n_edges == 0) {
        s.empty = true;
        return s;
    }
    std::size_t positives = 0;
    for (auto v : graph.y) {
        positives += v;
    }
    s.truth_fraction = static_cast<double>(positives) / static_cast<double>(s.n_edges);
    return s;
}

} // namespace qgnn::graphs
