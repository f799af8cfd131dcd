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
 * Collision events: TrackML CSV ingestion, pileup subsampling and a
 * helical-track surrogate generator. Units are mm, GeV and Tesla.
 */
#pragma once

#include <array>
#include <optional>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgnn::events {

class IngestError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct Hit {
    std::int64_t hit_id = 0;
    double r = 0.0;   ///< mm, > 0
    double phi = 0.0; ///< (-pi, pi]
    double z = 0.0;   ///< mm
    int volume_id = 0;
    int layer_id = 0;         ///< detector-native layer number
    int layer_index = -1;     ///< 0..9 once selected into the barrel, -1 before
    std::int64_t particle_id = 0; ///< 0 for noise
};

struct Particle {
    std::int64_t particle_id = 0;
    std::array<double, 3> vertex{};   ///< mm
    std::array<double, 3> momentum{}; ///< GeV
    int charge = 1;

    [[nodiscard]] double pt() const;
};

struct Event {
    std::int64_t event_id = 0;
    std::vector<Hit> hits;
    std::vector<Particle> particles;
    int pileup_mu = 0;
};

struct Cylindrical {
    double r;
    double phi;
    double z;
};

/// phi in (-pi, pi]; the negative x axis maps to +pi.
Cylindrical to_cylindrical(double x, double y, double z);
std::array<double, 3> to_cartesian(const Cylindrical &c);
/// Wrap an angle difference into (-pi, pi].
double wrap_angle(double a);

struct TrackmlPaths {
    std::filesystem::path hits;
    std::filesystem::path truth;
    std::filesystem::path particles;
};

/// Paths "<prefix>-hits.csv", "-truth.csv", "-particles.csv".
TrackmlPaths trackml_paths(const std::filesystem::path &prefix);

Event load_trackml_event(const std::filesystem::path &hits_path,
                         const std::filesystem::path &truth_path,
                         const std::filesystem::path &particles_path);
Event load_trackml_event(const TrackmlPaths &paths);

/// Writes the same three-file schema load_trackml_event reads.
void write_trackml_event(const Event &event, const TrackmlPaths &paths);

/// Distinct production vertices in first-appearance order.
std::vector<std::array<double, 3>> primary_vertices(const Event &event);

/**
 * Keep the particles of `mu` vertices drawn without replacement (a seeded
 * shuffle of the vertex list, first mu kept), their hits, and no noise.
 * With the same rng state, a smaller mu keeps a subset of a larger one.
 */
Event subsample_pileup(const Event &event, int mu, std::mt19937_64 &rng);

struct SynthConfig {
    /// Ten barrel layer radii (mm), strictly increasing.
    std::vector<double> layer_radii{32.0, 72.0, 116.0, 172.0, 260.0,
                                    360.0, 500.0, 660.0, 820.0, 1020.0};
    /// Barrel half-length per layer (mm); tracks leaving it produce no hit there.
    std::vector<double> layer_half_lengths{491.0, 491.0, 491.0, 491.0, 1083.0,
                                           1083.0, 1083.0, 1083.0, 1083.0, 1083.0};
    double magnetic_field = 2.0; ///< Tesla, along +z
    int tracks_per_vertex_min = 2;
    int tracks_per_vertex_max = 6;
    double vertex_z_spread = 55.0; ///< mm, gaussian sigma
    double pt_min = 1.0;           ///< GeV
    double pt_max = 10.0;          ///< GeV
    double eta_max = 1.0;
    double phi_min = -3.141592653589793; ///< azimuthal sector of generated tracks
    double phi_max = 3.141592653589793;
    double noise_hit_fraction = 0.0; ///< [0, 1)
    std::uint64_t seed = 1;

    void validate() const;
};

/// The detector-native (volume_id, layer_id) of barrel layer i.
std::pair<int, int> barrel_layer_ids(std::size_t layer_index);

struct HelixCrossing {
    std::array<double, 3> position; ///< mm
    double turning_angle;           ///< radians travelled in the transverse plane
};

/**
 * First outward crossing of the helix with the cylinder of radius R, or
 * nothing if the track never reaches it. A straight line when B == 0.
 */
std::optional<HelixCrossing> helix_crossing(const Particle &p, double field_tesla, double radius);

/// Transverse radius (mm) of a charge-q track of momentum pt in field B.
double helix_radius_mm(double pt, double field_tesla, int charge);

/**
 * One event with `mu` vertices at (0, 0, z ~ N(0, vertex_z_spread)). All
 * randomness comes from `rng`, so a freshly seeded engine reproduces the
 * event bit for bit.
 */
Event synth_event(const SynthConfig &config, int mu, std::mt19937_64 &rng,
                  std::int64_t event_id = 0);

} // namespace qgnn::events
