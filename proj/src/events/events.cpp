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
#include "qgnn/events.hpp"
#include "qgnn/csv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

namespace qgnn::events {

using std::numbers::pi;

double Particle::pt() const { return std::hypot(momentum[0], momentum[1]); }

Cylindrical to_cylindrical(double x, double y, double z) {
    double phi = std::atan2(y, x);
    if (phi == -pi) {
        phi = pi;
    }
    return {std::hypot(x, y), phi, z};
}

std::array<double, 3> to_cartesian(const Cylindrical &c) {
    return {c.r * std::cos(c.phi), c.r * std::sin(c.phi), c.z};
}

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * pi);
    if (a <= -pi) {
        a += 2.0 * pi;
    }
    return a;
}

TrackmlPaths trackml_paths(const std::filesystem::path &prefix) {
    const std::string p = prefix.string();
    return {p + "-hits.csv", p + "-truth.csv", p + "-particles.csv"};
}

namespace {

void require_file(const std::filesystem::path &p) {
    if (!std::filesystem::is_regular_file(p)) {
        throw IngestError("missing input file: " + p.string());
    }
}

} // namespace

Event load_trackml_event(const TrackmlPaths &paths) {
    return load_trackml_event(paths.hits, paths.truth, paths.particles);
}

Event load_trackml_event(const std::filesystem::path &hits_path,
                         const std::filesystem::path &truth_path,
                         const std::filesystem::path &particles_path) {
    require_file(hits_path);
    require_file(truth_path);
    require_file(particles_path);

    Event ev;
    std::unordered_map<std::int64_t, std::size_t> hit_index;
    {
        io::CsvReader csv(hits_path);
        const auto c_id = csv.column("hit_id");
        const auto c_x = csv.column("x");
        const auto c_y = csv.column("y");
        const auto c_z = csv.column("z");
        const auto c_vol = csv.column("volume_id");
        const auto c_layer = csv.column("layer_id");
        csv.column("module_id");
        while (csv.next()) {
            Hit h;
            h.hit_id = csv.get_int(c_id);
            const Cylindrical cyl =
                to_cylindrical(csv.get_double(c_x), csv.get_double(c_y), csv.get_double(c_z));
            h.r = cyl.r;
            h.phi = cyl.phi;
            h.z = cyl.z;
            h.volume_id = static_cast<int>(csv.get_int(c_vol));
            h.layer_id = static_cast<int>(csv.get_int(c_layer));
            if (!hit_index.emplace(h.hit_id, ev.hits.size()).second) {
                throw IngestError(hits_path.string() + ": row " + std::to_string(csv.row_number()) +
                                  ": duplicate hit_id " + std::to_string(h.hit_id));
            }
            ev.hits.push_back(h);
        }
    }
    std::unordered_set<std::int64_t> particle_ids;
    {
        io::CsvReader csv(particles_path);
        const auto c_id = csv.column("particle_id");
        const std::array<std::size_t, 3> c_v{csv.column("vx"), csv.column("vy"), csv.column("vz")};
        const std::array<std::size_t, 3> c_p{csv.column("px"), csv.column("py"), csv.column("pz")};
        const auto c_q = csv.column("q");
        while (csv.next()) {
            Particle p;
            p.particle_id = csv.get_int(c_id);
            for (std::size_t i = 0; i < 3; ++i) {
                p.vertex[i] = csv.get_double(c_v[i]);
                p.momentum[i] = csv.get_double(c_p[i]);
            }
            p.charge = static_cast<int>(csv.get_int(c_q));
            if (p.particle_id == 0 || !particle_ids.insert(p.particle_id).second) {
                throw IngestError(particles_path.string() + ": row " +
                                  std::to_string(csv.row_number()) + ": invalid or duplicate particle_id");
            }
            ev.particles.push_back(p);
        }
    }
    {
        io::CsvReader csv(truth_path);
        const auto c_hit = csv.column("hit_id");
        const auto c_particle = csv.column("particle_id");
        while (csv.next()) {
            const std::int64_t hit_id = csv.get_int(c_hit);
            const std::int64_t pid = csv.get_int(c_particle);
            auto it = hit_index.find(hit_id);
            if (it == hit_index.end()) {
                throw IngestError(truth_path.string() + ": row " + std::to_string(csv.row_number()) +
                                  ": hit_id " + std::to_string(hit_id) + " not present in " +
                                  hits_path.string());
            }
            if (pid != 0 && !particle_ids.contains(pid)) {
                throw IngestError(truth_path.string() + ": row " + std::to_string(csv.row_number()) +
                                  ": particle_id " + std::to_string(pid) + " not present in " +
                                  particles_path.string());
            }
            ev.hits[it->second].particle_id = pid;
        }
    }
    ev.pileup_mu = static_cast<int>(primary_vertices(ev).size());
    return ev;
}

void write_trackml_event(const Event &event, const TrackmlPaths &paths) {
    using io::format_double;
    auto open = [](const std::filesystem::path &p) {
        std::ofstream out(p);
        if (!out) {
            throw IngestError("cannot write " + p.string());
        }
        return out;
    };
    {
        auto out = open(paths.hits);
        out << "hit_id,x,y,z,volume_id,layer_id,module_id\n";
        for (const Hit &h : event.hits) {
            const auto xyz = to_cartesian({h.r, h.phi, h.z});
            out << h.hit_id << ',' << format_double(xyz[0]) << ',' << format_double(xyz[1]) << ','
                << format_double(xyz[2]) << ',' << h.volume_id << ',' << h.layer_id << ",0\n";
        }
    }
    {
        auto out = open(paths.truth);
        out << "hit_id,particle_id\n";
        for (const Hit &h : event.hits) {
            out << h.hit_id << ',' << h.particle_id << '\n';
        }
    }
    {
        std::unordered_map<std::int64_t, int> nhits;
        for (const Hit &h : event.hits) {
            ++nhits[h.particle_id];
        }
        auto out = open(paths.particles);
        out << "particle_id,vx,vy,vz,px,py,pz,q,nhits\n";
        for (const Particle &p : event.particles) {
            out << p.particle_id;
            for (double v : p.vertex) {
                out << ',' << format_double(v);
            }
            for (double v : p.momentum) {
                out << ',' << format_double(v);
            }
            out << ',' << p.charge << ',' << nhits[p.particle_id] << '\n';
        }
    }
}

std::vector<std::array<double, 3>> primary_vertices(const Event &event) {
    std::vector<std::array<double, 3>> out;
    std::map<std::array<double, 3>, bool> seen;
    for (const Particle &p : event.particles) {
        if (seen.emplace(p.vertex, true).second) {
            out.push_back(p.vertex);
        }
    }
    return out;
}

Event subsample_pileup(const Event &event, int mu, std::mt19937_64 &rng) {
    auto vertices = primary_vertices(event);
    if (mu < 0 || static_cast<std::size_t>(mu) > vertices.size()) {
        throw ArgumentError("cannot sample " + std::to_string(mu) + " vertices from " +
                            std::to_string(vertices.size()));
    }
    std::shuffle(vertices.begin(), vertices.end(), rng);
    std::map<std::array<double, 3>, bool> keep;
    for (int i = 0; i < mu; ++i) {
        keep.emplace(vertices[static_cast<std::size_t>(i)], true);
    }
    Event out;
    out.event_id = event.event_id;
    out.pileup_mu = mu;
    std::unordered_set<std::int64_t> kept_ids;
    for (const Particle &p : event.particles) {
        if (keep.contains(p.vertex)) {
            out.particles.push_back(p);
            kept_ids.insert(p.particle_id);
        }
    }
    for (const Hit &h : event.hits) {
        if (h.particle_id != 0 && kept_ids.contains(h.particle_id)) {
            out.hits.push_back(h);
        }
    }
    return out;
}

void SynthConfig::validate() const {
    if (layer_radii.size() != 10 || layer_half_lengths.size() != layer_radii.size()) {
        throw ArgumentError("synthetic detector needs ten layer radii and half-lengths");
    }
    for (std::size_t i = 0; i < layer_radii.size(); ++i) {
        if (layer_radii[i] <= 0.0 || (i > 0 && layer_radii[i] <= layer_radii[i - 1])) {
            throw ArgumentError("layer radii must be positive and strictly increasing");
        }
        if (layer_half_lengths[i] <= 0.0) {
            throw ArgumentError("layer half-lengths must be positive");
        }
    }
    if (magnetic_field < 0.0) {
        throw ArgumentError("magnetic field must be >= 0");
    }
    if (tracks_per_vertex_min < 0 || tracks_per_vertex_max < tracks_per_vertex_min) {
        throw ArgumentError("invalid tracks-per-vertex range");
    }
    if (vertex_z_spread < 0.0) {
        throw ArgumentError("vertex z spread must be >= 0");
    }
    if (!(pt_min > 0.0) || pt_max < pt_min) {
        throw ArgumentError("invalid pt range");
    }
    if (eta_max < 0.0) {
        throw ArgumentError("eta_max must be >= 0");
    }
    if (!(phi_max > phi_min) || phi_max - phi_min > 2.0 * pi + 1e-12) {
        throw ArgumentError("invalid phi sector");
    }
    if (noise_hit_fraction < 0.0 || noise_hit_fraction >= 1.0) {
        throw ArgumentError("noise_hit_fraction must be in [0, 1)");
    }
}

std::pair<int, int> barrel_layer_ids(std::size_t layer_index) {
    // pixel barrel (4 layers), short-strip barrel (4), long-strip barrel (2)
    if (layer_index < 4) {
        return {8, 2 * static_cast<int>(layer_index) + 2};
    }
    if (layer_index < 8) {
        return {13, 2 * static_cast<int>(layer_index - 4) + 2};
    }
    if (layer_index < 10) {
        return {17, 2 * static_cast<int>(layer_index - 8) + 2};
    }
    throw ArgumentError("barrel layer index out of range");
}

double helix_radius_mm(double pt, double field_tesla, int charge) {
    return pt / (0.3 * field_tesla * std::abs(charge)) * 1000.0;
}

std::optional<HelixCrossing> helix_crossing(const Particle &p, double field_tesla, double radius) {
    const double pt = p.pt();
    if (pt <= 0.0) {
        return std::nullopt;
    }
    const double ux = p.momentum[0] / pt;
    const double uy = p.momentum[1] / pt;
    const double tan_lambda = p.momentum[2] / pt;
    const double vx = p.vertex[0];
    const double vy = p.vertex[1];
    const double vz = p.vertex[2];

    if (field_tesla == 0.0 || p.charge == 0) {
        const double vu = vx * ux + vy * uy;
        const double disc = vu * vu - (vx * vx + vy * vy) + radius * radius;
        if (disc < 0.0) {
            return std::nullopt;
        }
        const double t = -vu + std::sqrt(disc);
        if (t < 0.0) {
            return std::nullopt;
        }
        return HelixCrossing{{vx + t * ux, vy + t * uy, vz + t * tan_lambda}, 0.0};
    }

    const double rho = helix_radius_mm(pt, field_tesla, p.charge);
    // positive charges bend clockwise in a field along +z
    const double h = p.charge * field_tesla > 0.0 ? -1.0 : 1.0;
    const double nx = -uy;
    const double ny = ux;
    const double cx = vx + h * rho * nx;
    const double cy = vy + h * rho * ny;
    // P(a) = C + rho * (sin a * u - h cos a * n); solve |P(a)| = radius
    const double big_k = (radius * radius - (cx * cx + cy * cy) - rho * rho) / (2.0 * rho);
    const double a_coef = cx * ux + cy * uy;
    const double b_coef = -h * (cx * nx + cy * ny);
    const double m = std::hypot(a_coef, b_coef);
    if (m == 0.0 || std::abs(big_k) > m) {
        return std::nullopt;
    }
    const double delta = std::atan2(a_coef, b_coef);
    const double spread = std::acos(big_k / m);
    double best = 2.0 * pi;
    for (double cand : {delta + spread, delta - spread}) {
        cand = std::fmod(cand, 2.0 * pi);
        if (cand < 0.0) {
            cand += 2.0 * pi;
        }
        if (cand > 0.0 && cand < best) {
            best = cand;
        }
    }
    if (best >= 2.0 * pi) {
        return std::nullopt;
    }
    const double s = std::sin(best);
    const double c = std::cos(best);
    return HelixCrossing{{cx + rho * (s * ux - h * c * nx), cy + rho * (s * uy - h * c * ny),
                          vz + rho * best * tan_lambda},
                         best};
}

Event synth_event(const SynthConfig &config, int mu, std::mt19937_64 &rng, std::int64_t event_id) {
    config.validate();
    if (mu < 0) {
        throw ArgumentError("mu must be >= 0");
    }
    Event ev;
    ev.event_id = event_id;
    ev.pileup_mu = mu;

    std::normal_distribution<double> vertex_z(0.0, 1.0);
    std::uniform_int_distribution<int> n_tracks(config.tracks_per_vertex_min,
                                                config.tracks_per_vertex_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::int64_t next_hit = 1;
    std::size_t track_hits = 0;

    for (int v = 0; v < mu; ++v) {
        const double z0 = config.vertex_z_spread * vertex_z(rng);
        const int count = n_tracks(rng);
        for (int t = 0; t < count; ++t) {
            Particle p;
            p.particle_id = (static_cast<std::int64_t>(v + 1) << 20) | (t + 1);
            p.vertex = {0.0, 0.0, z0};
            // dN/dpt ~ pt^-2: uniform in 1/pt
            const double inv_pt = 1.0 / config.pt_max +
                                  unit(rng) * (1.0 / config.pt_min - 1.0 / config.pt_max);
            const double pt = 1.0 / inv_pt;
            const double eta = config.eta_max * (2.0 * unit(rng) - 1.0);
            const double phi = config.phi_min + unit(rng) * (config.phi_max - config.phi_min);
            p.charge = unit(rng) < 0.5 ? -1 : 1;
            p.momentum = {pt * std::cos(phi), pt * std::sin(phi), pt * std::sinh(eta)};
            ev.particles.push_back(p);

            for (std::size_t layer = 0; layer < config.layer_radii.size(); ++layer) {
                const auto crossing = helix_crossing(p, config.magnetic_field, config.layer_radii[layer]);
                if (!crossing) {
                    break;
                }
                if (std::abs(crossing->position[2]) > config.layer_half_lengths[layer]) {
                    continue;
                }
                const Cylindrical cyl =
                    to_cylindrical(crossing->position[0], crossing->position[1], crossing->position[2]);
                const auto [vol, lid] = barrel_layer_ids(layer);
                ev.hits.push_back(Hit{next_hit++, cyl.r, cyl.phi, cyl.z, vol, lid, -1, p.particle_id});
                ++track_hits;
            }
        }
    }

    if (config.noise_hit_fraction > 0.0) {
        const auto n_noise = static_cast<std::size_t>(std::llround(
            config.noise_hit_fraction / (1.0 - config.noise_hit_fraction) * static_cast<double>(track_hits)));
        std::uniform_int_distribution<std::size_t> pick_layer(0, config.layer_radii.size() - 1);
        for (std::size_t i = 0; i < n_noise; ++i) {
            const std::size_t layer = pick_layer(rng);
            const double phi = config.phi_min + unit(rng) * (config.phi_max - config.phi_min);
            const double half = config.layer_half_lengths[layer];
            const double z = -half + 2.0 * half * unit(rng);
            const auto [vol, lid] = barrel_layer_ids(layer);
            ev.hits.push_back(Hit{next_hit++, config.layer_radii[layer], wrap_angle(phi), z, vol, lid,
                                  -1, 0});
        }
    }
    return ev;
}

} // namespace qgnn::events
