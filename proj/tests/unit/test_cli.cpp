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

#include "json.hpp"
#include "qgnn/cli.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qgnn;
using namespace qgnn::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "qgnn_test_cli";

int run_args(std::vector<std::string> args) {
    args.insert(args.begin(), "qgnn");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path &p) { return json::parse(slurp(p)); }

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_table(const fs::path &p) {
    Table t;
    std::istringstream lines(slurp(p));
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, ',')) {
            cells.push_back(cell);
        }
        if (t.header.empty()) {
            t.header = cells;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

/// Runs the installed binary through the shell; returns (exit code, stdout + stderr).
std::pair<int, std::string> run_binary(const std::string &args) {
    const char *exe = std::getenv("QGNN_CLI");
    REQUIRE(exe != nullptr);
    const std::string cmd = std::string(exe) + " " + args + " 2>&1";
    FILE *pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 512> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) {
        out += buf.data();
    }
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

const std::vector<std::string> kSmall{"--synth.vertex_z_spread=5", "--synth.phi_min=-0.3",
                                      "--synth.phi_max=0.3"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string> &tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

struct Fixture {
    Fixture() {
        fs::remove_all(kRoot);
        fs::create_directories(kRoot);
    }
    ~Fixture() { fs::remove_all(kRoot); }
};

} // namespace

TEST_CASE("configuration file and overrides") {
    Fixture fx;
    const auto path = kRoot / "run.cfg";
    std::ofstream(path) << "# comment\n"
                           "seed = 9   # trailing\n"
                           "\n"
                           "train.learning_rate=0.002\n"
                           "model.variant = original_qgnn\n";
    RunConfig c;
    c.load_file(path);
    CHECK(c.get_int("seed") == 9);
    CHECK(c.get_double("train.learning_rate") == 0.002);
    CHECK(c.variant().kind == model::VariantKind::original_qgnn);
    c.apply_override("--seed=4");
    CHECK(c.get_int("seed") == 4);
    CHECK(c.train().seed == 4);
    CHECK(c.get("train.threshold") == "0.5");

    for (const auto &k : config_keys()) {
        CHECK_NOTHROW((void)c.get(k.name));
    }
    CHECK_THROWS_AS(c.set("no.such.key", "1"), ConfigError);
    CHECK_THROWS_AS(c.apply_override("seed=1"), ConfigError);
    std::ofstream(path) << "bogus = 1\n";
    RunConfig d;
    CHECK_THROWS_AS(d.load_file(path), ConfigError);
    CHECK(run_args({"synth", "--no.such.key=1"}) == kConfigError);
    CHECK(run_args({"--config", path.string(), "synth"}) == kConfigError);
    CHECK(run_args({"synth", "--data_dir=" + kRoot.string(), "--synth.pt_min=-1"}) == kConfigError);

    RunConfig e;
    e.set("data_dir", "/x");
    CHECK(e.events_dir() == fs::path("/x/events"));
    CHECK(e.graphs_dir() == fs::path("/x/graphs"));
    e.set("graphs_dir", "/y");
    CHECK(e.graphs_dir() == fs::path("/y"));
}

TEST_CASE("synth is byte-identical for a fixed seed") {
    Fixture fx;
    for (const char *name : {"a", "b"}) {
        const auto dir = kRoot / name;
        REQUIRE(run_args({"synth", "--data_dir=" + dir.string(), "--seed=7", "--n_events=3",
                          "--mu=3"}) == kOk);
    }
    std::size_t files = 0;
    for (const auto &entry : fs::directory_iterator(kRoot / "a" / "events")) {
        const auto other = kRoot / "b" / "events" / entry.path().filename();
        CHECK(slurp(entry.path()) == slurp(other));
        ++files;
    }
    CHECK(files == 9);
    // Re-running overwrites in place.
    REQUIRE(run_args({"synth", "--data_dir=" + (kRoot / "a").string(), "--seed=7", "--n_events=3",
                      "--mu=3"}) == kOk);
    CHECK(slurp(kRoot / "a/events/event000000001-hits.csv") ==
          slurp(kRoot / "b/events/event000000001-hits.csv"));
}

TEST_CASE("ingest copies TrackML files and reports missing truth") {
    Fixture fx;
    const auto src = kRoot / "trackml";
    REQUIRE(run_args({"synth", "--events_dir=" + src.string(), "--n_events=2", "--mu=2"}) == kOk);
    REQUIRE(run_args({"ingest", "--input=" + src.string(),
                      "--data_dir=" + (kRoot / "copy").string()}) == kOk);
    const auto original = load_events(src);
    const auto copied = load_events(kRoot / "copy/events");
    REQUIRE(copied.size() == 2);
    for (std::size_t e = 0; e < 2; ++e) {
        REQUIRE(copied[e].hits.size() == original[e].hits.size());
        for (std::size_t i = 0; i < copied[e].hits.size(); ++i) {
            const auto &a = original[e].hits[i];
            const auto &b = copied[e].hits[i];
            CHECK(a.hit_id == b.hit_id);
            CHECK(a.particle_id == b.particle_id);
            CHECK(b.r == doctest::Approx(a.r).epsilon(1e-12));
            CHECK(b.z == doctest::Approx(a.z).epsilon(1e-12));
        }
    }

    fs::remove(src / "event000000002-truth.csv");
    const auto [code, out] = run_binary("ingest --input=" + src.string() +
                                        " --data_dir=" + (kRoot / "copy2").string());
    CHECK(code == kIoError);
    CHECK(out.find("event000000002-truth.csv") != std::string::npos);
    CHECK(run_args({"ingest", "--data_dir=" + kRoot.string()}) == kConfigError);
}

TEST_CASE("graph building, zero cuts and stats round trip") {
    Fixture fx;
    const std::string data = "--data_dir=" + kRoot.string();
    CHECK(run_args({"build-graphs", data}) == kIoError);
    REQUIRE(run_args(with({"synth", data, "--n_events=4", "--mu=3"}, kSmall)) == kOk);
    REQUIRE(run_args({"build-graphs", data}) == kOk);
    const auto stats = read_json(kRoot / "graphs/stats.json");
    const auto graphs = load_graphs(kRoot / "graphs");
    REQUIRE(graphs.size() == 4);
    CHECK(json::parse(graph_stats_json(graphs)) == stats);
    CHECK(stats["n_edges"]["mean"].get<double>() > 0);

    REQUIRE(run_args({"build-graphs", data, "--cuts.phi_slope_max=0", "--cuts.z0_max=0"}) == kOk);
    const auto closed = read_json(kRoot / "graphs/stats.json");
    CHECK(closed["n_edges"]["mean"].get<double>() == 0.0);
    CHECK(closed["n_empty"].get<int>() == 4);
    for (const auto &g : load_graphs(kRoot / "graphs")) {
        CHECK(g.n_edges() == 0);
    }
}

TEST_CASE("train, evaluate and report") {
    Fixture fx;
    const std::string data = "--data_dir=" + kRoot.string();
    REQUIRE(run_args(with({"synth", data, "--n_events=6", "--mu=2"}, kSmall)) == kOk);
    REQUIRE(run_args({"build-graphs", data}) == kOk);
    const std::vector<std::string> common{data, "--train.k_folds=3", "--train.epochs=2",
                                          "--train.train_set_size=0"};
    for (const char *variant : {"original_cgnn", "original_qgnn"}) {
        const std::string out = "--out_dir=" + (kRoot / variant).string();
        REQUIRE(run_args(with({"train", out, std::string("--model.variant=") + variant}, common)) ==
                kOk);
    }
    const auto run_dir = kRoot / "original_cgnn";
    const auto summary = read_json(run_dir / "summary.json");
    CHECK(summary["folds"].size() == 3);
    const auto records = train::read_metrics_csv(run_dir / "metrics.csv");
    CHECK(records.size() == 3 * 3 * 2);
    CHECK(slurp(run_dir / "metrics.csv").rfind(train::kMetricsHeader, 0) == 0);
    CHECK(fs::exists(run_dir / "curve.csv"));

    // Scoring fold 1's own training events reproduces its last training record.
    const auto eval_out = kRoot / "eval";
    REQUIRE(run_args(with({"evaluate", "--out_dir=" + eval_out.string(),
                           "--checkpoint=" + (run_dir / "fold1.json").string(),
                           "--model.variant=original_cgnn", "--eval.split=train", "--eval.fold=1"},
                          common)) == kOk);
    const auto ev = read_json(eval_out / "evaluation.json");
    const train::MetricsRecord *last = nullptr;
    for (const auto &r : records) {
        if (r.fold == 1 && r.split == "train") {
            last = &r;
        }
    }
    REQUIRE(last != nullptr);
    CHECK(last->epoch == 2);
    CHECK(ev["accuracy"].get<double>() == doctest::Approx(last->metrics.accuracy).epsilon(1e-12));
    CHECK(ev["recall"].get<double>() == doctest::Approx(last->metrics.recall).epsilon(1e-12));
    CHECK(ev["loss"].get<double>() == doctest::Approx(last->loss).epsilon(1e-9));

    // A checkpoint of one variant cannot be evaluated as another.
    const auto [code, msg] = run_binary("evaluate --data_dir=" + kRoot.string() + " --out_dir=" +
                                        eval_out.string() + " --checkpoint=" +
                                        (run_dir / "fold0.json").string() +
                                        " --model.variant=upgraded_qgnn");
    CHECK(code == kConfigError);
    CHECK(msg.find("original_cgnn") != std::string::npos);
    CHECK(msg.find("upgraded_qgnn") != std::string::npos);

    const auto rep = kRoot / "report";
    REQUIRE(run_args({"report", "--out_dir=" + rep.string(),
                      "--runs=" + run_dir.string() + "," + (kRoot / "original_qgnn").string()}) ==
            kOk);
    const auto table = read_table(rep / "table.csv");
    CHECK(table.header == std::vector<std::string>{"model", "accuracy", "accuracy_std",
                                                   "precision", "precision_std", "recall",
                                                   "recall_std", "specificity", "specificity_std"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][0] == "original_cgnn");
    CHECK(table.rows[1][0] == "original_qgnn");
    CHECK(slurp(rep / "table.md").find("| Model | Accuracy | Precision | Recall | Specificity |") !=
          std::string::npos);
    CHECK(run_args({"report", "--out_dir=" + rep.string()}) == kConfigError);
    CHECK(run_args({"report", "--out_dir=" + rep.string(), "--runs=" + (kRoot / "nope").string()}) ==
          kIoError);
}

TEST_CASE("pileup sweep writes one curve per mu") {
    Fixture fx;
    const std::string data = "--data_dir=" + kRoot.string();
    REQUIRE(run_args(with({"synth", data, "--n_events=4", "--mu=4"}, kSmall)) == kOk);
    REQUIRE(run_args({"sweep", data, "--sweep.mu=1,2,4", "--train.k_folds=2", "--train.epochs=1",
                      "--train.train_set_size=0", "--model.variant=original_cgnn"}) == kOk);
    const auto out = kRoot / "run";
    for (const char *mu : {"1", "2", "4"}) {
        CHECK(fs::exists(out / (std::string("curve_mu") + mu + ".csv")));
        CHECK(fs::exists(out / (std::string("mu") + mu) / "summary.json"));
    }
    const auto sweep = read_table(out / "sweep.csv");
    CHECK(sweep.rows.size() == 3);
    // Subsampled edge counts grow with mu because the vertex subsets nest.
    double prev = -1.0;
    for (const char *mu : {"1", "2", "4"}) {
        const double ne = read_json(out / (std::string("mu") + mu) / "stats.json")["n_edges"]["mean"];
        CHECK(ne >= prev);
        prev = ne;
    }
    CHECK(run_args({"sweep", data, "--sweep.mu=50"}) == kConfigError);
}

TEST_CASE("exit-code contract") {
    Fixture fx;
    CHECK(run_binary("").first == kConfigError);
    CHECK(run_binary("frobnicate").first == kConfigError);
    CHECK(run_binary("--help").first == kOk);
    CHECK(run_binary("train --data_dir=" + (kRoot / "empty").string()).first == kIoError);
    const std::string data = "--data_dir=" + kRoot.string();
    REQUIRE(run_args(with({"synth", data, "--n_events=3", "--mu=2"}, kSmall)) == kOk);
    REQUIRE(run_args({"build-graphs", data}) == kOk);
    // A vanishing radius divisor overflows the inputs to infinity.
    const auto [code, msg] = run_binary("train " + data +
                                        " --train.k_folds=3 --train.train_set_size=0 "
                                        "--train.epochs=1 --model.variant=original_cgnn "
                                        "--model.feature_scale=1e-307,1,1");
    CHECK(code == kNumericalError);
    CHECK(msg.find("non-finite") != std::string::npos);
}
