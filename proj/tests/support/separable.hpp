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
 * Graphs whose edge labels are a linear threshold of the endpoint features,
 * with a margin: y = [z_dst > z_src], and |z_dst - z_src| >= margin.
 */
#pragma once

#include "qgnn/graphs.hpp"

#include <random>
#include <vector>

namespace qgnn::testing {

inline graphs::EventGraph separable_graph(std::mt19937_64 &rng, std::size_t nodes_per_layer = 6,
                                          std::size_t n_layers = 4, double margin_mm = 80.0) {
    static constexpr double kRadii[] = {32, 72, 116, 172, 260, 360, 500, 660, 820, 1020};
    std::uniform_real_distribution<double> phi(-0.2, 0.2);
    std::uniform_real_distribution<double> z(-400.0, 400.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    graphs::EventGraph g;
    for (std::size_t layer = 0; layer < n_layers; ++layer) {
        for (std::size_t i = 0; i < nodes_per_layer; ++i) {
            g.x.insert(g.x.end(), {kRadii[layer], phi(rng), z(rng)});
            g.hit_id.push_back(static_cast<std::int64_t>(g.hit_id.size() + 1));
            g.layer_index.push_back(static_cast<int>(layer));
            g.particle_id.push_back(0);
        }
    }
    for (std::uint32_t a = 0; a < g.n_nodes(); ++a) {
        for (std::uint32_t b = 0; b < g.n_nodes(); ++b) {
            if (g.layer_index[b] != g.layer_index[a] + 1 || u(rng) >= 0.5) {
                continue;
            }
            const double dz = g.x[3 * b + 2] - g.x[3 * a + 2];
            if (std::abs(dz) < margin_mm) {
                continue;
            }
            g.edges.push_back({a, b});
            g.y.push_back(dz > 0 ? 1 : 0);
        }
    }
    graphs::rebuild_incidence(g);
    return g;
}

inline std::vector<graphs::EventGraph> separable_dataset(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<graphs::EventGraph> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(separable_graph(rng));
        out.back().event_id = static_cast<std::int64_t>(i + 1);
    }
    return out;
}

} // namespace qgnn::testing
