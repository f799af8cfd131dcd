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
#include "doctest.h"

#include "qgnn/graphs.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>

using namespace qgnn;
using namespace qgnn::graphs;
using events::Hit;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

Hit hit(std::int64_t id, double r, double phi, double z, std::int64_t pid = 1, int layer_index = -1) {
    Hit h;
    h.hit_id = id;
    h.r = r;
    h.phi = phi;
    h.z = z;
    h.particle_id = pid;
    h.layer_index = layer_index;
    return h;
}

events::Event synthetic(std::uint64_t seed, int mu) {
    events::SynthConfig cfg;
    cfg.noise_hit_fraction = 0.05;
    std::mt19937_64 rng(seed);
    return events::synth_event(cfg, mu, rng, static_cast<std::int64_t>(seed));
}

void check_invariants(const EventGraph &g) {
    REQUIRE(g.r_in.rows() == g.n_nodes());
    REQUIRE(g.r_out.rows() == g.n_nodes());
    REQUIRE(g.r_in.cols() == g.n_edges());
    REQUIRE(g.r_out.cols() == g.n_edges());
    REQUIRE(g.y.size() == g.n_edges());
    const auto dense_in = g.r_in.to_dense();
    const auto dense_out = g.r_out.to_dense();
    const std::size_t ne = g.n_edges();
    for (std::size_t k = 0; k < ne; ++k) {
        double sum_in = 0.0;
        double sum_out = 0.0;
        std::uint32_t src = 0;
        std::uint32_t dst = 0;
        for (std::size_t j = 0; j < g.n_nodes(); ++j) {
            sum_in += dense_in[j * ne + k];
            sum_out += dense_out[j * ne + k];
            if (dense_in[j * ne + k] == 1.0) {
                dst = static_cast<std::uint32_t>(j);
            }
            if (dense_out[j * ne + k] == 1.0) {
                src = static_cast<std::uint32_t>(j);
            }
        }
        CHECK(sum_in == 1.0);
        CHECK(sum_out == 1.0);
        CHECK(src != dst);
        // Reconstruction from the two incidence matrices.
        CHECK(Edge{src, dst} == g.edges[k]);
        CHECK(g.layer_index[dst] == g.layer_index[src] + 1);
        if (g.y[k] == 1) {
            CHECK(g.particle_id[src] == g.particle_id[dst]);
            CHECK(g.particle_id[src] != 0);
        }
    }
    CHECK(std::is_sorted(g.edges.begin(), g.edges.end()));
    for (std::size_t j = 0; j < g.n_nodes(); ++j) {
        for (auto k : g.r_in.edges_of(j)) {
            CHECK(g.edges[k].dst == j);
        }
        for (auto k : g.r_out.edges_of(j)) {
            CHECK(g.edges[k].src == j);
        }
    }
}

} // namespace

TEST_CASE("pair features") {
    auto f = pair_features(hit(1, 100, 0.3, 50), hit(2, 200, 0.3, 100));
    CHECK(f.phi_slope == 0.0);
    CHECK(f.z0 == 0.0);

    f = pair_features(hit(1, 100, kPi - 0.001, 0), hit(2, 200, -kPi + 0.001, 0));
    CHECK(f.phi_slope * 100.0 == doctest::Approx(0.002).epsilon(1e-9));

    f = pair_features(hit(1, 100, 0, 10), hit(2, 200, 0, 20));
    CHECK(f.z0 == doctest::Approx(0.0));
    f = pair_features(hit(1, 100, 0, 10), hit(2, 200, 0, 30));
    CHECK(f.z0 == doctest::Approx(-10.0));

    CHECK_THROWS_AS(pair_features(hit(1, 200, 0, 0), hit(2, 100, 0, 0)), std::invalid_argument);
}

TEST_CASE("hit selection") {
    events::Event ev;
    events::Particle slow;
    slow.particle_id = 1;
    slow.momentum = {0.9, 0, 0};
    events::Particle fast;
    fast.particle_id = 2;
    fast.momentum = {3, 4, 0};
    ev.particles = {slow, fast};
    auto add = [&](std::int64_t id, int vol, int lay, std::int64_t pid) {
        Hit h = hit(id, 50.0 * static_cast<double>(id), 0.1, 0, pid);
        h.volume_id = vol;
        h.layer_id = lay;
        ev.hits.push_back(h);
    };
    add(1, 8, 2, 1);  // parent below pt threshold
    add(2, 8, 4, 2);
    add(3, 13, 2, 2);
    add(4, 7, 2, 2);  // endcap
    add(5, 17, 4, 2);
    add(6, 8, 6, 0);  // noise
    const auto kept = select_hits(ev, CutConfig{});
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].hit_id == 2);
    CHECK(kept[0].layer_index == 1);
    CHECK(kept[1].layer_index == 4);
    CHECK(kept[2].layer_index == 9);

    // All hits of one 5 GeV barrel track survive.
    events::SynthConfig cfg;
    cfg.pt_min = cfg.pt_max = 5.0;
    cfg.eta_max = 0.2;
    cfg.vertex_z_spread = 0.0;
    cfg.tracks_per_vertex_min = cfg.tracks_per_vertex_max = 2;
    std::mt19937_64 rng(1);
    const auto one = events::synth_event(cfg, 1, rng);
    CHECK(select_hits(one, CutConfig{}).size() == one.hits.size());
}

TEST_CASE("three-hit track") {
    std::vector<Hit> hits{hit(1, 32, 0.1, 3.2, 5, 0), hit(2, 72, 0.1, 7.2, 5, 1),
                          hit(3, 116, 0.1, 11.6, 5, 2)};
    const auto g = build_graph(hits, CutConfig{});
    CHECK(g.n_nodes() == 3);
    REQUIRE(g.n_edges() == 2);
    CHECK(g.edges[0] == Edge{0, 1});
    CHECK(g.edges[1] == Edge{1, 2});
    CHECK(g.r_out.at(0, 0) == 1.0);
    CHECK(g.r_out.at(1, 0) == 0.0);
    CHECK(g.r_in.at(1, 0) == 1.0);
    CHECK(g.r_in.at(0, 0) == 0.0);
    CHECK(g.y == std::vector<std::uint8_t>{1, 1});
    const auto s = graph_stats(g);
    CHECK(s.truth_fraction == 1.0);
    CHECK_FALSE(s.empty);
    check_invariants(g);
}

TEST_CASE("non-adjacent layers give no edges") {
    std::vector<Hit> hits{hit(1, 32, 0.1, 0, 5, 0), hit(2, 116, 0.1, 0, 5, 2)};
    const auto g = build_graph(hits, CutConfig{});
    CHECK(g.n_edges() == 0);
    const auto s = graph_stats(g);
    CHECK(s.empty);
    CHECK(s.truth_fraction == 0.0);
    CHECK(s.n_nodes == 2);

    const auto none = build_graph(std::vector<Hit>{}, CutConfig{});
    const auto e = graph_stats(none);
    CHECK(e.n_nodes == 0);
    CHECK(e.n_edges == 0);
    CHECK(e.empty);
}

TEST_CASE("parallel tracks far apart in phi") {
    std::vector<Hit> hits;
    const double radii[] = {32, 72, 116, 172};
    for (int l = 0; l < 4; ++l) {
        hits.push_back(hit(2 * l + 1, radii[l], 0.1, 0, 1, l));
        hits.push_back(hit(2 * l + 2, radii[l], 1.1, 0, 2, l));
    }
    const auto g = build_graph(hits, CutConfig{});
    CHECK(g.n_edges() == 6);
    CHECK(graph_stats(g).truth_fraction == 1.0);
    check_invariants(g);
}

TEST_CASE("build_graph matches brute-force enumeration on synthetic events") {
    const CutConfig cuts;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto hits = select_hits(synthetic(seed, 3), cuts);
        const auto g = build_graph(hits, cuts);
        REQUIRE(g.n_nodes() == hits.size());
        std::set<std::pair<std::int64_t, std::int64_t>> expected;
        for (const auto &a : hits) {
            for (const auto &b : hits) {
                if (b.layer_index != a.layer_index + 1) {
                    continue;
                }
                double dphi = b.phi - a.phi;
                while (dphi > kPi) dphi -= 2 * kPi;
                while (dphi <= -kPi) dphi += 2 * kPi;
                const double slope = dphi / (b.r - a.r);
                const double z0 = a.z - a.r * (b.z - a.z) / (b.r - a.r);
                if (std::abs(slope) < cuts.phi_slope_max && std::abs(z0) < cuts.z0_max) {
                    expected.insert({a.hit_id, b.hit_id});
                }
            }
        }
        std::set<std::pair<std::int64_t, std::int64_t>> got;
        for (std::size_t k = 0; k < g.n_edges(); ++k) {
            const auto [s, d] = g.edges[k];
            got.insert({g.hit_id[s], g.hit_id[d]});
            const bool same = g.particle_id[s] == g.particle_id[d] && g.particle_id[s] != 0;
            CHECK(g.y[k] == (same ? 1 : 0));
        }
        CHECK(got == expected);
        check_invariants(g);
    }
}

TEST_CASE("loosening cuts never removes an edge") {
    const auto ev = synthetic(5, 6);
    CutConfig tight;
    tight.phi_slope_max = 2e-4;
    tight.z0_max = 20;
    const auto hits = select_hits(ev, tight);
    std::set<Edge> previous;
    for (double scale : {1.0, 1.5, 3.0, 10.0}) {
        CutConfig c = tight;
        c.phi_slope_max *= scale;
        c.z0_max *= scale;
        const auto g = build_graph(hits, c);
        const std::set<Edge> now(g.edges.begin(), g.edges.end());
        CHECK(std::includes(now.begin(), now.end(), previous.begin(), previous.end()));
        previous = now;
    }
}

TEST_CASE("cut validation and the all-closed limit") {
    CutConfig c;
    c.phi_slope_max = 0.0;
    c.z0_max = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK_NOTHROW(c.validate(true));
    const auto hits = select_hits(synthetic(2, 3), CutConfig{});
    const auto g = build_graph(hits, c);
    CHECK(g.n_edges() == 0);
    CHECK(g.n_nodes() == hits.size());
}

TEST_CASE("incidence construction") {
    Incidence r(3, {2, 0, 2});
    CHECK(r.rows() == 3);
    CHECK(r.cols() == 3);
    const auto e2 = r.edges_of(2);
    CHECK(std::vector<std::uint32_t>(e2.begin(), e2.end()) == std::vector<std::uint32_t>{0, 2});
    CHECK(r.edges_of(1).empty());
    CHECK_THROWS_AS(Incidence(2, {0, 2}), std::out_of_range);
}

TEST_CASE("graph files round trip") {
    const fs::path dir = fs::temp_directory_path() / "qgnn_test_graphs_rt";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto hits = select_hits(synthetic(9, 4), CutConfig{});
    const auto g = build_graph(hits, CutConfig{}, 9);
    write_graph(g, dir / "event000000009");
    const auto back = read_graph(dir / "event000000009");
    CHECK(back.event_id == 9);
    CHECK(back.x == g.x);
    CHECK(back.hit_id == g.hit_id);
    CHECK(back.layer_index == g.layer_index);
    CHECK(back.particle_id == g.particle_id);
    CHECK(back.edges == g.edges);
    CHECK(back.y == g.y);
    check_invariants(back);
    CHECK_THROWS_AS(read_graph(dir / "missing"), events::IngestError);
    fs::remove_all(dir);
}
