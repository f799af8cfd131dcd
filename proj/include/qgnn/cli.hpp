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
 * Batch command surface: ingest, synth, build-graphs, train, evaluate,
 * report, sweep. Settings come from one flat key = value file plus
 * --key=value overrides; every key has a default.
 */
#pragma once

#include "qgnn/events.hpp"
#include "qgnn/graphs.hpp"
#include "qgnn/model.hpp"
#include "qgnn/train.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qgnn::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kIoError = 2, kNumericalError = 3 };

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct KeyDoc {
    const char *name;
    const char *default_value;
    const char *help;
};

/// Every recognised key with its default and a one-line description.
std::span<const KeyDoc> config_keys();

class RunConfig {
  public:
    /// Defaults; data_dir falls back to $QGNN_DATA_DIR, then "data".
    RunConfig();

    /// "key = value" lines; '#' starts a comment. Unknown keys are rejected.
    void load_file(const std::filesystem::path &path);
    void set(std::string_view key, std::string_view value);
    /// Parses "--key=value".
    void apply_override(std::string_view arg);

    [[nodiscard]] const std::string &get(std::string_view key) const;
    [[nodiscard]] double get_double(std::string_view key) const;
    [[nodiscard]] long long get_int(std::string_view key) const;
    [[nodiscard]] std::size_t get_size(std::string_view key) const;
    [[nodiscard]] bool get_bool(std::string_view key) const;
    [[nodiscard]] std::vector<long long> get_int_list(std::string_view key) const;
    [[nodiscard]] std::vector<std::string> get_list(std::string_view key) const;

    [[nodiscard]] std::filesystem::path data_dir() const;
    [[nodiscard]] std::filesystem::path events_dir() const;
    [[nodiscard]] std::filesystem::path graphs_dir() const;
    [[nodiscard]] std::filesystem::path out_dir() const;

    [[nodiscard]] events::SynthConfig synth() const;
    [[nodiscard]] graphs::CutConfig cuts() const;
    [[nodiscard]] model::ModelVariant variant() const;
    [[nodiscard]] train::TrainConfig train() const;

  private:
    std::map<std::string, std::string, std::less<>> values_;
};

/// "event000000042" style stem for an event id.
std::string event_stem(std::int64_t event_id);

/// Event triplets below `dir`, sorted by event id.
std::vector<events::Event> load_events(const std::filesystem::path &dir);
/// Graph pairs below `dir`, sorted by event id.
std::vector<graphs::EventGraph> load_graphs(const std::filesystem::path &dir);

/// Means and sample standard deviations of N_V, N_E and truth fraction.
std::string graph_stats_json(std::span<const graphs::EventGraph> graphs);

int cmd_ingest(const RunConfig &config);
int cmd_synth(const RunConfig &config);
int cmd_build_graphs(const RunConfig &config);
int cmd_train(const RunConfig &config);
int cmd_evaluate(const RunConfig &config);
int cmd_report(const RunConfig &config);
int cmd_sweep(const RunConfig &config);

/// Full entry point; maps exceptions to the exit-code contract.
int run(int argc, const char *const *argv);

} // namespace qgnn::cli
