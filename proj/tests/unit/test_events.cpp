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

#include "qgnn/events.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace qgnn;
using namespace qgnn::events;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct TempDir {
    fs::path path;
    explicit TempDir(const char *name) : path{fs::temp_directory_path() / name} {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path &p, const std::string &text) {
    std::ofstream(p) << text;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Particle particle(std::int64_t id, std::array<double, 3> v, std::array<double, 3> p, int q = 1) {
    Particle out;
    out.particle_id = id;
    out.vertex = v;
    out.momentum = p;
    out.charge = q;
    return out;
}

} // namespace

TEST_CASE("cylindrical conversion conventions") {
    auto c = to_cylindrical(0, 10, 5);
    CHECK(c.r == doctest::Approx(10));
    CHECK(c.phi == doctest::Approx(kPi / 2));
    CHECK(c.z == 5);
    c = to_cylindrical(-1, 0, 0);
    CHECK(c.r == 1);
    CHECK(c.phi == kPi);
    c = to_cylindrical(-1, -0.0, 0);
    CHECK(c.phi == kPi);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1000, 1000);
    for (int i = 0; i < 1000; ++i) {
        const std::array<double, 3> p{u(rng), u(rng), u(rng)};
        const auto back = to_cartesian(to_cylindrical(p[0], p[1], p[2]));
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(back[k] - p[k]) <= 1e-12 * std::max(1.0, std::abs(p[k])));
        }
        const double phi = to_cylindrical(p[0], p[1], p[2]).phi;
        CHECK(phi > -kPi);
        CHECK(phi <= kPi);
    }
}

TEST_CASE("angle wrapping") {
    CHECK(wrap_angle((-kPi + 0.001) - (kPi - 0.001)) == doctest::Approx(0.002));
    CHECK(wrap_angle(kPi) == kPi);
    CHECK(wrap_angle(-kPi) == kPi);
    CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
}

TEST_CASE("TrackML triplet loads, converts and carries truth") {
    TempDir dir("qgnn_test_events_load");
    const auto paths = trackml_paths(dir.path / "event000000001");
    write_file(paths.hits, "hit_id,x,y,z,volume_id,layer_id,module_id\n"
                           "1,0,10,5,8,2,1\n"
                           "2,-1,0,0,8,4,1\n"
                           "3,3,4,-2,13,2,7\n");
    write_file(paths.truth, "hit_id,particle_id,tx,ty\n1,42,0,0\n2,42,0,0\n");
    write_file(paths.particles, "particle_id,vx,vy,vz,px,py,pz,q,nhits\n42,0,0,1,3,4,0.5,-1,2\n");
    const Event ev = load_trackml_event(paths);
    REQUIRE(ev.hits.size() == 3);
    CHECK(ev.hits[0].r == doctest::Approx(10));
    CHECK(ev.hits[0].phi == doctest::Approx(kPi / 2));
    CHECK(ev.hits[1].phi == kPi);
    CHECK(ev.hits[0].particle_id == 42);
    CHECK(ev.hits[2].particle_id == 0);
    CHECK(ev.hits[2].volume_id == 13);
    REQUIRE(ev.particles.size() == 1);
    CHECK(ev.particles[0].pt() == doctest::Approx(5));
    CHECK(ev.particles[0].charge == -1);
    CHECK(ev.pileup_mu == 1);
}

TEST_CASE("ingestion errors name the file and row") {
    TempDir dir("qgnn_test_events_err");
    const auto paths = trackml_paths(dir.path / "e");
    write_file(paths.hits, "hit_id,x,y,z,volume_id,layer_id,module_id\n1,1,0,0,8,2,1\n");
    write_file(paths.particles, "particle_id,vx,vy,vz,px,py,pz,q\n");

    auto message_of = [&] {
        try {
            load_trackml_event(paths);
        } catch (const IngestError &e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message_of().find(paths.truth.string()) != std::string::npos);

    write_file(paths.truth, "hit_id,particle_id\n7,0\n");
    CHECK(message_of().find("7") != std::string::npos);

    write_file(paths.truth, "hit_id,particle_id\n1,0\n");
    write_file(paths.hits, "hit_id,x,y,z,volume_id,layer_id,module_id\n1,1,0,0,8,2,1\n2,abc,0,0,8,2,1\n");
    const auto msg = message_of();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find(paths.hits.string()) != std::string::npos);

    write_file(paths.hits, "hit_id,x,y,z,volume_id,layer_id\n1,1,0,0,8,2\n");
    CHECK(message_of().find("module_id") != std::string::npos);
}

TEST_CASE("write then load reproduces an event") {
    TempDir dir("qgnn_test_events_rt");
    SynthConfig cfg;
    cfg.noise_hit_fraction = 0.1;
    std::mt19937_64 rng(3);
    const Event ev = synth_event(cfg, 3, rng, 5);
    const auto paths = trackml_paths(dir.path / "event000000005");
    write_trackml_event(ev, paths);
    const Event back = load_trackml_event(paths);
    REQUIRE(back.hits.size() == ev.hits.size());
    REQUIRE(back.particles.size() == ev.particles.size());
    for (std::size_t i = 0; i < ev.hits.size(); ++i) {
        CHECK(back.hits[i].hit_id == ev.hits[i].hit_id);
        CHECK(back.hits[i].particle_id == ev.hits[i].particle_id);
        CHECK(back.hits[i].r == doctest::Approx(ev.hits[i].r).epsilon(1e-12));
        CHECK(back.hits[i].phi == doctest::Approx(ev.hits[i].phi).epsilon(1e-12));
        CHECK(back.hits[i].z == ev.hits[i].z);
        CHECK(back.hits[i].volume_id == ev.hits[i].volume_id);
        CHECK(back.hits[i].layer_id == ev.hits[i].layer_id);
    }
    CHECK(back.pileup_mu == 3);
}

TEST_CASE("synthetic events are deterministic per seed") {
    SynthConfig cfg;
    std::mt19937_64 a(7);
    std::mt19937_64 b(7);
    const Event ea = synth_event(cfg, 4, a);
    const Event eb = synth_event(cfg, 4, b);
    REQUIRE(ea.hits.size() == eb.hits.size());
    for (std::size_t i = 0; i < ea.hits.size(); ++i) {
        CHECK(ea.hits[i].r == eb.hits[i].r);
        CHECK(ea.hits[i].phi == eb.hits[i].phi);
        CHECK(ea.hits[i].z == eb.hits[i].z);
    }
    CHECK(primary_vertices(ea).size() == 4);
}

TEST_CASE("zero field gives straight rays at constant phi") {
    SynthConfig cfg;
    cfg.magnetic_field = 0.0;
    cfg.vertex_z_spread = 0.0;
    cfg.eta_max = 0.3;
    std::mt19937_64 rng(2);
    const Event ev = synth_event(cfg, 2, rng);
    std::map<std::int64_t, std::vector<Hit>> by_particle;
    for (const auto &h : ev.hits) {
        by_particle[h.particle_id].push_back(h);
    }
    REQUIRE_FALSE(by_particle.empty());
    for (const auto &[id, hits] : by_particle) {
        CHECK(hits.size() == 10);
        for (const auto &h : hits) {
            CHECK(h.phi == doctest::Approx(hits.front().phi).epsilon(1e-12));
            CHECK(h.z / h.r == doctest::Approx(hits.front().z / hits.front().r).epsilon(1e-10));
        }
    }
}

TEST_CASE("helix radius and reachability") {
    CHECK(helix_radius_mm(1.0, 2.0, 1) == doctest::Approx(1000.0 / 0.6));
    CHECK(helix_radius_mm(3.0, 1.0, -1) == doctest::Approx(10000.0));
    // 2 rho = 450 mm: the circle through the origin cannot reach 600 mm.
    const double pt = 0.3 * 2.0 * 0.225;
    const auto p = particle(1, {0, 0, 0}, {pt, 0, 0.1});
    CHECK(helix_crossing(p, 2.0, 400.0).has_value());
    CHECK_FALSE(helix_crossing(p, 2.0, 600.0).has_value());

    SynthConfig cfg;
    cfg.pt_min = cfg.pt_max = pt;
    cfg.vertex_z_spread = 0.0;
    cfg.eta_max = 0.1;
    std::mt19937_64 rng(1);
    const Event ev = synth_event(cfg, 1, rng);
    std::map<std::int64_t, int> count;
    for (const auto &h : ev.hits) {
        ++count[h.particle_id];
    }
    for (const auto &[id, n] : count) {
        CHECK(n < 10);
        CHECK(n == 6); // radii 32 .. 360 lie within 2 rho = 450
    }
}

TEST_CASE("synthetic hits satisfy the helix equations") {
    SynthConfig cfg;
    cfg.eta_max = 0.8;
    std::mt19937_64 rng(9);
    const Event ev = synth_event(cfg, 5, rng);
    std::map<std::int64_t, const Particle *> parts;
    for (const auto &p : ev.particles) {
        parts[p.particle_id] = &p;
    }
    std::size_t checked = 0;
    for (const auto &h : ev.hits) {
        const Particle &p = *parts.at(h.particle_id);
        const double pt = p.pt();
        const double rho = helix_radius_mm(pt, cfg.magnetic_field, p.charge);
        const double dx = p.momentum[0] / pt;
        const double dy = p.momentum[1] / pt;
        // Positive charges bend clockwise in a +z field: centre to the right of the direction.
        const double sgn = p.charge > 0 ? 1.0 : -1.0;
        const double cx = p.vertex[0] + sgn * rho * dy;
        const double cy = p.vertex[1] - sgn * rho * dx;
        const auto xyz = to_cartesian({h.r, h.phi, h.z});
        CHECK(std::hypot(xyz[0] - cx, xyz[1] - cy) == doctest::Approx(rho).epsilon(1e-9));
        const double chord = std::hypot(xyz[0] - p.vertex[0], xyz[1] - p.vertex[1]);
        const double arc = 2.0 * rho * std::asin(std::min(1.0, chord / (2.0 * rho)));
        CHECK(xyz[2] == doctest::Approx(p.vertex[2] + p.momentum[2] / pt * arc).epsilon(1e-9));
        // Bending direction: the transverse cross product of direction and displacement.
        const double cross = dx * (xyz[1] - p.vertex[1]) - dy * (xyz[0] - p.vertex[0]);
        CHECK(cross * sgn <= 1e-9);
        ++checked;
    }
    CHECK(checked > 20);
}

TEST_CASE("noise hits follow the configured fraction") {
    SynthConfig cfg;
    cfg.noise_hit_fraction = 0.2;
    std::mt19937_64 rng(4);
    const Event ev = synth_event(cfg, 10, rng);
    std::size_t noise = 0;
    for (const auto &h : ev.hits) {
        noise += h.particle_id == 0 ? 1 : 0;
    }
    const double frac = static_cast<double>(noise) / static_cast<double>(ev.hits.size());
    CHECK(frac == doctest::Approx(0.2).epsilon(0.02));
}

TEST_CASE("pileup subsampling") {
    // Three vertices with 2, 3 and 4 tracks, one hit per track.
    Event ev;
    std::int64_t id = 1;
    const int tracks[3] = {2, 3, 4};
    for (int v = 0; v < 3; ++v) {
        for (int t = 0; t < tracks[v]; ++t) {
            ev.particles.push_back(particle(id, {0, 0, 10.0 * v}, {1, 1, 0}));
            Hit h;
            h.hit_id = id;
            h.r = 32;
            h.particle_id = id;
            ev.hits.push_back(h);
            ++id;
        }
    }
    Hit noise;
    noise.hit_id = 100;
    noise.r = 72;
    ev.hits.push_back(noise);

    std::mt19937_64 rng(1);
    const Event all = subsample_pileup(ev, 3, rng);
    CHECK(all.particles.size() == 9);
    CHECK(all.hits.size() == 9);
    CHECK(all.pileup_mu == 3);

    const Event none = subsample_pileup(ev, 0, rng);
    CHECK(none.particles.empty());
    CHECK(none.hits.empty());

    CHECK_THROWS_AS(subsample_pileup(ev, 4, rng), ArgumentError);

    bool found = false;
    for (std::uint64_t seed = 0; seed < 64 && !found; ++seed) {
        std::mt19937_64 r(seed);
        const Event two = subsample_pileup(ev, 2, r);
        std::set<double> zs;
        for (const auto &p : two.particles) {
            zs.insert(p.vertex[2]);
        }
        if (zs == std::set<double>{0.0, 20.0}) {
            CHECK(two.particles.size() == 6);
            CHECK(two.hits.size() == 6);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("subsampling nests when the rng sequence is shared") {
    SynthConfig cfg;
    std::mt19937_64 gen(5);
    const Event ev = synth_event(cfg, 12, gen);
    std::set<std::int64_t> previous;
    for (int mu = 0; mu <= 12; mu += 3) {
        std::mt19937_64 rng(77);
        const Event sub = subsample_pileup(ev, mu, rng);
        std::set<std::int64_t> ids;
        for (const auto &h : sub.hits) {
            ids.insert(h.hit_id);
        }
        CHECK(std::includes(ids.begin(), ids.end(), previous.begin(), previous.end()));
        CHECK(static_cast<int>(primary_vertices(sub).size()) == mu);
        previous = ids;
    }
}

TEST_CASE("configuration validation") {
    SynthConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.layer_radii[3] = cfg.layer_radii[2];
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg = SynthConfig{};
    cfg.noise_hit_fraction = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg = SynthConfig{};
    cfg.pt_max = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}

TEST_CASE("writer output is byte-stable") {
    TempDir dir("qgnn_test_events_bytes");
    SynthConfig cfg;
    for (int round = 0; round < 2; ++round) {
        std::mt19937_64 rng(11);
        write_trackml_event(synth_event(cfg, 2, rng, 1),
                            trackml_paths(dir.path / ("r" + std::to_string(round))));
    }
    for (const char *suffix : {"-hits.csv", "-truth.csv", "-particles.csv"}) {
        CHECK(slurp(dir.path / (std::string("r0") + suffix)) ==
              slurp(dir.path / (std::string("r1") + suffix)));
    }
}
