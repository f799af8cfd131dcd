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
#include "qgnn/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace qgnn::cli {

namespace {

constexpr std::array kKeys{
    KeyDoc{"data_dir", "", "root for default directories ($QGNN_DATA_DIR, else ./data)"},
    KeyDoc{"events_dir", "", "event CSV triplets (default <data_dir>/events)"},
    KeyDoc{"graphs_dir", "", "graph CSV pairs (default <data_dir>/graphs)"},
    KeyDoc{"out_dir", "", "run outputs (default <data_dir>/run)"},
    KeyDoc{"input", "", "ingest: directory holding TrackML event*-hits.csv files"},
    KeyDoc{"checkpoint", "", "evaluate: checkpoint file"},
    KeyDoc{"eval.split", "all", "evaluate: all | train | validation"},
    KeyDoc{"eval.fold", "0", "evaluate: fold whose split is scored"},
    KeyDoc{"runs", "", "report: comma-separated run directories"},
    KeyDoc{"threads", "0", "worker threads (0 = all cores)"},
    KeyDoc{"seed", "1", "master seed"},
    KeyDoc{"n_events", "10", "synth: number of events"},
    KeyDoc{"mu", "10", "synth: pileup (vertices per event)"},
    KeyDoc{"sweep.mu", "50,100,150,200", "sweep: pileup values, subsampled from events_dir"},
    KeyDoc{"synth.magnetic_field", "2", "Tesla"},
    KeyDoc{"synth.tracks_min", "2", "tracks per vertex, lower bound"},
    KeyDoc{"synth.tracks_max", "6", "tracks per vertex, upper bound"},
    KeyDoc{"synth.vertex_z_spread", "55", "gaussian sigma of vertex z (mm)"},
    KeyDoc{"synth.pt_min", "1", "GeV"},
    KeyDoc{"synth.pt_max", "10", "GeV"},
    KeyDoc{"synth.eta_max", "1", "pseudorapidity range"},
    KeyDoc{"synth.phi_min", "-3.141592653589793", "track azimuth sector start"},
    KeyDoc{"synth.phi_max", "3.141592653589793", "track azimuth sector end"},
    KeyDoc{"synth.noise_fraction", "0", "fraction of noise hits in [0, 1)"},
    KeyDoc{"cuts.pt_min", "1", "GeV"},
    KeyDoc{"cuts.phi_slope_max", "0.0006", "rad / mm"},
    KeyDoc{"cuts.z0_max", "100", "mm"},
    KeyDoc{"model.variant", "upgraded_qgnn",
           "original_cgnn | original_qgnn | upgraded_cgnn | upgraded_qgnn | parallel_qgnn"},
    KeyDoc{"model.hidden_dim", "", "override the variant's hidden width"},
    KeyDoc{"model.n_iter", "3", "message-passing iterations"},
    KeyDoc{"model.circuit_layers", "3", "entangling layers per circuit"},
    KeyDoc{"model.readout", "", "z | probs | amplitude_real (default: variant's)"},
    KeyDoc{"model.rescale_probs", "true", "scale probability readouts by 2^m"},
    KeyDoc{"model.feature_scale", "1000,3.141592653589793,1000",
           "divisors applied to (r, phi, z) before the InputNet"},
    KeyDoc{"model.bypass_circuit", "false", "replace circuits with the identity"},
    KeyDoc{"train.learning_rate", "0.01", ""},
    KeyDoc{"train.epochs", "10", ""},
    KeyDoc{"train.k_folds", "5", ""},
    KeyDoc{"train.train_set_size", "45", "events used (0 = all)"},
    KeyDoc{"train.threshold", "0.5", "score threshold"},
    KeyDoc{"train.folds", "", "comma-separated fold subset (default all)"},
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T> T parse_number(std::string_view key, std::string_view text) {
    T v{};
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("'" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    while (!s.empty()) {
        const auto pos = s.find(',');
        const auto item = trim(s.substr(0, pos));
        if (!item.empty()) {
            out.push_back(item);
        }
        if (pos == std::string_view::npos) {
            break;
        }
        s.remove_prefix(pos + 1);
    }
    return out;
}

} // namespace

std::span<const KeyDoc> config_keys() { return kKeys; }

RunConfig::RunConfig() {
    for (const auto &k : kKeys) {
        values_.emplace(k.name, k.default_value);
    }
    if (const char *env = std::getenv("QGNN_DATA_DIR"); env && *env) {
        values_["data_dir"] = env;
    }
}

void RunConfig::set(std::string_view key, std::string_view value) {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
    it->second = std::string(trim(value));
}

void RunConfig::apply_override(std::string_view arg) {
    if (!arg.starts_with("--")) {
        throw ConfigError("unexpected argument '" + std::string(arg) + "'");
    }
    arg.remove_prefix(2);
    const auto eq = arg.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("override '--" + std::string(arg) + "' needs the form --key=value");
    }
    set(arg.substr(0, eq), arg.substr(eq + 1));
}

void RunConfig::load_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path.string());
    }
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) {
            s = s.substr(0, hash);
        }
        s = trim(s);
        if (s.empty()) {
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(n) + ": expected key = value");
        }
        try {
            set(trim(s.substr(0, eq)), s.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ConfigError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
}

const std::string &RunConfig::get(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw std::logic_error("undeclared configuration key '" + std::string(key) + "'");
    }
    return it->second;
}

double RunConfig::get_double(std::string_view key) const {
    return parse_number<double>(key, get(key));
}

long long RunConfig::get_int(std::string_view key) const {
    return parse_number<long long>(key, get(key));
}

std::size_t RunConfig::get_size(std::string_view key) const {
    const long long v = get_int(key);
    if (v < 0) {
        throw ConfigError("'" + std::string(key) + "' must be >= 0");
    }
    return static_cast<std::size_t>(v);
}

bool RunConfig::get_bool(std::string_view key) const {
    const auto &v = get(key);
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError("'" + std::string(key) + "': expected true or false, got '" + v + "'");
}

std::vector<long long> RunConfig::get_int_list(std::string_view key) const {
    std::vector<long long> out;
    for (auto item : split_commas(get(key))) {
        out.push_back(parse_number<long long>(key, item));
    }
    return out;
}

std::vector<std::string> RunConfig::get_list(std::string_view key) const {
    std::vector<std::string> out;
    for (auto item : split_commas(get(key))) {
        out.emplace_back(item);
    }
    return out;
}

std::filesystem::path RunConfig::data_dir() const {
    const auto &v = get("data_dir");
    return v.empty() ? std::filesystem::path("data") : std::filesystem::path(v);
}

std::filesystem::path RunConfig::events_dir() const {
    const auto &v = get("events_dir");
    return v.empty() ? data_dir() / "events" : std::filesystem::path(v);
}

std::filesystem::path RunConfig::graphs_dir() const {
    const auto &v = get("graphs_dir");
    return v.empty() ? data_dir() / "graphs" : std::filesystem::path(v);
}

std::filesystem::path RunConfig::out_dir() const {
    const auto &v = get("out_dir");
    return v.empty() ? data_dir() / "run" : std::filesystem::path(v);
}

events::SynthConfig RunConfig::synth() const {
    events::SynthConfig s;
    s.magnetic_field = get_double("synth.magnetic_field");
    s.tracks_per_vertex_min = static_cast<int>(get_int("synth.tracks_min"));
    s.tracks_per_vertex_max = static_cast<int>(get_int("synth.tracks_max"));
    s.vertex_z_spread = get_double("synth.vertex_z_spread");
    s.pt_min = get_double("synth.pt_min");
    s.pt_max = get_double("synth.pt_max");
    s.eta_max = get_double("synth.eta_max");
    s.phi_min = get_double("synth.phi_min");
    s.phi_max = get_double("synth.phi_max");
    s.noise_hit_fraction = get_double("synth.noise_fraction");
    s.seed = static_cast<std::uint64_t>(get_int("seed"));
    try {
        s.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    return s;
}

graphs::CutConfig RunConfig::cuts() const {
    graphs::CutConfig c;
    c.pt_min = get_double("cuts.pt_min");
    c.phi_slope_max = get_double("cuts.phi_slope_max");
    c.z0_max = get_double("cuts.z0_max");
    try {
        c.validate(true);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    return c;
}

model::ModelVariant RunConfig::variant() const {
    try {
        auto v = model::ModelVariant::make(model::parse_variant(get("model.variant")));
        if (!get("model.hidden_dim").empty()) {
            v.hidden_dim = get_size("model.hidden_dim");
        }
        v.n_iter = get_size("model.n_iter");
        v.circuit_layers = get_size("model.circuit_layers");
        if (!get("model.readout").empty()) {
            v.readout = quantum::parse_readout(get("model.readout"));
        }
        v.rescale_probs = get_bool("model.rescale_probs");
        v.bypass_circuit = get_bool("model.bypass_circuit");
        const auto scales = get_list("model.feature_scale");
        if (scales.size() != 3) {
            throw ConfigError("model.feature_scale needs three divisors (r, phi, z)");
        }
        for (std::size_t c = 0; c < 3; ++c) {
            const double d = parse_number<double>("model.feature_scale", scales[c]);
            if (!(d > 0.0) || !std::isfinite(d)) {
                throw ConfigError("model.feature_scale divisors must be positive");
            }
            v.feature_scale[c] = 1.0 / d;
        }
        if (v.hidden_dim == 0) {
            throw ConfigError("model.hidden_dim must be positive");
        }
        if (v.is_quantum()) {
            model::make_block_spec(v, true).circuit->validate();
        }
        return v;
    } catch (const ConfigError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
}

train::TrainConfig RunConfig::train() const {
    train::TrainConfig t;
    t.learning_rate = get_double("train.learning_rate");
    t.epochs = get_size("train.epochs");
    t.k_folds = get_size("train.k_folds");
    t.train_set_size = get_size("train.train_set_size");
    t.threshold = get_double("train.threshold");
    t.seed = static_cast<std::uint64_t>(get_int("seed"));
    t.variant = variant();
    for (long long f : get_int_list("train.folds")) {
        if (f < 0) {
            throw ConfigError("train.folds entries must be >= 0");
        }
        t.folds.push_back(static_cast<std::size_t>(f));
    }
    try {
        t.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    return t;
}

} // namespace qgnn::cli
