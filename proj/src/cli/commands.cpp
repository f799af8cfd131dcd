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
#include "qgnn/csv.hpp"
#include "qgnn/parallel.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace qgnn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Event id from a "<stem>-<suffix>" file name: the trailing digits of the stem.
std::int64_t event_id_of(std::string_view stem) {
    std::size_t b = stem.size();
    while (b > 0 && stem[b - 1] >= '0' && stem[b - 1] <= '9') {
        --b;
    }
    if (b == stem.size()) {
        throw IoError("file stem '" + std::string(stem) + "' carries no event number");
    }
    return std::stoll(std::string(stem.substr(b)));
}

/// Stems of files named "<stem><suffix>" in dir, sorted by event id.
std::vector<std::pair<std::int64_t, fs::path>> stems_with(const fs::path &dir,
                                                          std::string_view suffix) {
    if (!fs::is_directory(dir)) {
        throw IoError("directory not found: " + dir.string());
    }
    std::vector<std::pair<std::int64_t, fs::path>> out;
    for (const auto &entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.ends_with(suffix)) {
            const std::string stem = name.substr(0, name.size() - suffix.size());
            out.emplace_back(event_id_of(stem), dir / stem);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Removes files this tool writes (event*<suffix>) so reruns leave no stale outputs.
void clear_outputs(const fs::path &dir, std::initializer_list<std::string_view> suffixes) {
    if (!fs::is_directory(dir)) {
        return;
    }
    std::vector<fs::path> doomed;
    for (const auto &entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        for (auto s : suffixes) {
            if (entry.is_regular_file() && name.starts_with("event") && name.ends_with(s)) {
                doomed.push_back(entry.path());
            }
        }
    }
    for (const auto &p : doomed) {
        fs::remove(p);
    }
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

json read_json(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double> &v) {
    MeanStd m;
    if (v.empty()) {
        return m;
    }
    for (double x : v) {
        m.mean += x;
    }
    m.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) {
            ss += (x - m.mean) * (x - m.mean);
        }
        m.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return m;
}

std::vector<graphs::EventGraph> build_all(std::span<const events::Event> evs,
                                          const graphs::CutConfig &cuts) {
    std::vector<graphs::EventGraph> out;
    out.reserve(evs.size());
    for (const auto &ev : evs) {
        out.push_back(graphs::build_graph(graphs::select_hits(ev, cuts), cuts, ev.event_id));
    }
    return out;
}

/// Fold-averaged metrics per (epoch, split), in epoch order, train before validation.
std::vector<train::MetricsRecord> fold_mean_curve(std::span<const train::MetricsRecord> records) {
    std::map<std::pair<std::size_t, std::string>, std::vector<const train::MetricsRecord *>> groups;
    for (const auto &r : records) {
        groups[{r.epoch, r.split}].push_back(&r);
    }
    std::vector<train::MetricsRecord> out;
    for (const auto &[key, rs] : groups) {
        train::MetricsRecord m;
        m.metrics.accuracy = m.metrics.precision = m.metrics.recall = m.metrics.specificity = 0.0;
        m.epoch = key.first;
        m.split = key.second;
        const double n = static_cast<double>(rs.size());
        for (const auto *r : rs) {
            m.loss += r->loss / n;
            m.metrics.accuracy += r->metrics.accuracy / n;
            m.metrics.precision += r->metrics.precision / n;
            m.metrics.recall += r->metrics.recall / n;
            m.metrics.specificity += r->metrics.specificity / n;
        }
        out.push_back(m);
    }
    return out;
}

std::string curve_csv(std::span<const train::MetricsRecord> curve) {
    std::string text = "epoch,split,loss,accuracy,precision,recall,specificity\n";
    for (const auto &r : curve) {
        const std::string row = train::metrics_csv_row(r);
        text += row.substr(row.find(',') + 1) + "\n";
    }
    return text;
}

void print_record(const train::MetricsRecord &r) {
    if (r.split != "validation") {
        return;
    }
    std::printf("fold %zu epoch %3zu  loss %.4f  acc %.4f  prec %.4f  rec %.4f  spec %.4f\n",
                r.fold, r.epoch, r.loss, r.metrics.accuracy, r.metrics.precision,
                r.metrics.recall, r.metrics.specificity);
    std::fflush(stdout);
}

std::vector<std::size_t> eval_indices(const RunConfig &config, std::size_t n_graphs) {
    const auto &split = config.get("eval.split");
    std::vector<std::size_t> all(n_graphs);
    for (std::size_t i = 0; i < n_graphs; ++i) {
        all[i] = i;
    }
    if (split == "all") {
        return all;
    }
    if (split != "train" && split != "validation") {
        throw ConfigError("eval.split must be all, train or validation");
    }
    const auto tc = config.train();
    const std::size_t n =
        tc.train_set_size == 0 ? n_graphs : std::min(tc.train_set_size, n_graphs);
    const auto folds = train::kfold_split(n, tc.k_folds, tc.seed);
    const std::size_t fold = config.get_size("eval.fold");
    if (fold >= folds.size()) {
        throw ConfigError("eval.fold out of range");
    }
    return split == "train" ? folds[fold].train : folds[fold].validation;
}

} // namespace

std::string event_stem(std::int64_t event_id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "event%09lld", static_cast<long long>(event_id));
    return buf;
}

std::vector<events::Event> load_events(const fs::path &dir) {
    std::vector<events::Event> out;
    for (const auto &[id, stem] : stems_with(dir, "-hits.csv")) {
        auto ev = events::load_trackml_event(events::trackml_paths(stem));
        ev.event_id = id;
        out.push_back(std::move(ev));
    }
    return out;
}

std::vector<graphs::EventGraph> load_graphs(const fs::path &dir) {
    std::vector<graphs::EventGraph> out;
    for (const auto &[id, stem] : stems_with(dir, "-nodes.csv")) {
        out.push_back(graphs::read_graph(stem));
    }
    return out;
}

std::string graph_stats_json(std::span<const graphs::EventGraph> gs) {
    std::vector<double> nv;
    std::vector<double> ne;
    std::vector<double> tf;
    std::size_t empty = 0;
    for (const auto &g : gs) {
        const auto s = graphs::graph_stats(g);
        nv.push_back(static_cast<double>(s.n_nodes));
        ne.push_back(static_cast<double>(s.n_edges));
        tf.push_back(s.truth_fraction);
        empty += s.empty ? 1 : 0;
    }
    auto entry = [](const std::vector<double> &v) {
        const auto m = mean_std(v);
        return json{{"mean", m.mean}, {"std", m.std}};
    };
    json doc{{"n_graphs", gs.size()},  {"n_empty", empty},          {"n_nodes", entry(nv)},
             {"n_edges", entry(ne)},   {"truth_fraction", entry(tf)}};
    return doc.dump(2) + "\n";
}

int cmd_ingest(const RunConfig &config) {
    const auto &input = config.get("input");
    if (input.empty()) {
        throw ConfigError("ingest needs input=<directory of TrackML event files>");
    }
    const auto evs = load_events(input);
    const auto out = config.events_dir();
    fs::create_directories(out);
    clear_outputs(out, {"-hits.csv", "-truth.csv", "-particles.csv"});
    std::size_t hits = 0;
    for (const auto &ev : evs) {
        events::write_trackml_event(ev, events::trackml_paths(out / event_stem(ev.event_id)));
        hits += ev.hits.size();
    }
    std::printf("ingested %zu events, %zu hits -> %s\n", evs.size(), hits, out.string().c_str());
    return kOk;
}

int cmd_synth(const RunConfig &config) {
    const auto synth = config.synth();
    const auto n = config.get_size("n_events");
    const auto mu = config.get_int("mu");
    if (mu < 0) {
        throw ConfigError("mu must be >= 0");
    }
    const auto out = config.events_dir();
    fs::create_directories(out);
    clear_outputs(out, {"-hits.csv", "-truth.csv", "-particles.csv"});
    std::mt19937_64 rng(synth.seed);
    std::size_t hits = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const auto ev =
            events::synth_event(synth, static_cast<int>(mu), rng, static_cast<std::int64_t>(i));
        events::write_trackml_event(ev, events::trackml_paths(out / event_stem(ev.event_id)));
        hits += ev.hits.size();
    }
    std::printf("synthesized %zu events, %zu hits -> %s\n", n, hits, out.string().c_str());
    return kOk;
}

int cmd_build_graphs(const RunConfig &config) {
    const auto cuts = config.cuts();
    const auto evs = load_events(config.events_dir());
    if (evs.empty()) {
        std::fprintf(stderr, "warning: no events in %s\n", config.events_dir().string().c_str());
        return kIoError;
    }
    const auto gs = build_all(evs, cuts);
    const auto out = config.graphs_dir();
    fs::create_directories(out);
    clear_outputs(out, {"-nodes.csv", "-edges.csv"});
    for (const auto &g : gs) {
        graphs::write_graph(g, out / event_stem(g.event_id));
    }
    const auto stats = graph_stats_json(gs);
    write_text(out / "stats.json", stats);
    std::printf("%s", stats.c_str());
    return kOk;
}

int cmd_train(const RunConfig &config) {
    auto tc = config.train();
    const auto gs = load_graphs(config.graphs_dir());
    if (gs.empty()) {
        throw IoError("no graphs in " + config.graphs_dir().string());
    }
    const auto out = config.out_dir();
    fs::create_directories(out);
    tc.checkpoint_dir = out;
    const auto result = train::train_model(gs, tc, print_record);
    train::write_metrics_csv(out / "metrics.csv", result.records);
    write_text(out / "summary.json", train::summary_json(result, tc));
    write_text(out / "curve.csv", curve_csv(fold_mean_curve(result.records)));
    std::printf("wrote %s\n", (out / "summary.json").string().c_str());
    return kOk;
}

int cmd_evaluate(const RunConfig &config) {
    const auto &ckpt = config.get("checkpoint");
    if (ckpt.empty()) {
        throw ConfigError("evaluate needs checkpoint=<file>");
    }
    const auto tc = config.train();
    model::GNN model(tc.variant, tc.seed);
    model.load(ckpt);
    const auto gs = load_graphs(config.graphs_dir());
    const auto idx = eval_indices(config, gs.size());
    const auto e = train::evaluate(model, gs, idx, tc.threshold);
    const auto &c = e.metrics.counts;
    json doc{{"checkpoint", ckpt},
             {"variant", std::string(model::to_string(tc.variant.kind))},
             {"n_graphs", idx.size()},
             {"threshold", tc.threshold},
             {"loss", e.loss},
             {"accuracy", e.metrics.accuracy},
             {"precision", e.metrics.precision},
             {"recall", e.metrics.recall},
             {"specificity", e.metrics.specificity},
             {"undefined_ratio", e.metrics.undefined},
             {"confusion", {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}}}};
    const auto out = config.out_dir();
    fs::create_directories(out);
    write_text(out / "evaluation.json", doc.dump(2) + "\n");
    std::printf("%s\n", doc.dump(2).c_str());
    return kOk;
}

int cmd_report(const RunConfig &config) {
    const auto runs = config.get_list("runs");
    if (runs.empty()) {
        throw ConfigError("report needs runs=<dir>[,<dir>...]");
    }
    static constexpr const char *kCols[] = {"accuracy", "precision", "recall", "specificity"};
    std::string table = "model";
    for (const char *c : kCols) {
        table += std::string(",") + c + "," + c + "_std";
    }
    table += "\n";
    std::string markdown = "| Model | Accuracy | Precision | Recall | Specificity |\n"
                           "|---|---|---|---|---|\n";
    std::string curves = "run,epoch,split,loss,accuracy,precision,recall,specificity\n";
    for (const auto &run : runs) {
        const auto summary = read_json(fs::path(run) / "summary.json");
        const std::string label = summary.at("variant").get<std::string>();
        table += label;
        markdown += "| " + label + " |";
        for (const char *c : kCols) {
            const double m = summary.at("mean").at(c).get<double>();
            const double s = summary.at("std").at(c).get<double>();
            table += "," + io::format_double(m) + "," + io::format_double(s);
            char cell[64];
            std::snprintf(cell, sizeof cell, " %.3f ± %.3f |", m, s);
            markdown += cell;
        }
        table += "\n";
        markdown += "\n";
        const auto records = train::read_metrics_csv(fs::path(run) / "metrics.csv");
        for (const auto &r : fold_mean_curve(records)) {
            const std::string row = train::metrics_csv_row(r);
            curves += label + "," + row.substr(row.find(',') + 1) + "\n";
        }
    }
    const auto out = config.out_dir();
    fs::create_directories(out);
    write_text(out / "table.csv", table);
    write_text(out / "table.md", markdown);
    write_text(out / "curves.csv", curves);
    std::printf("%s", markdown.c_str());
    return kOk;
}

int cmd_sweep(const RunConfig &config) {
    auto tc = config.train();
    const auto cuts = config.cuts();
    const auto mus = config.get_int_list("sweep.mu");
    if (mus.empty()) {
        throw ConfigError("sweep.mu is empty");
    }
    const auto evs = load_events(config.events_dir());
    if (evs.empty()) {
        throw IoError("no events in " + config.events_dir().string());
    }
    const auto out = config.out_dir();
    fs::create_directories(out);
    std::string table = "mu,accuracy,accuracy_std,precision,recall,specificity\n";
    for (long long mu : mus) {
        std::vector<events::Event> sub;
        for (const auto &ev : evs) {
            // Same stream for every mu, so smaller pileups are subsets of larger ones.
            std::mt19937_64 rng(tc.seed ^ static_cast<std::uint64_t>(ev.event_id) * 0x9e3779b97f4a7c15ULL);
            sub.push_back(events::subsample_pileup(ev, static_cast<int>(mu), rng));
        }
        const auto gs = build_all(sub, cuts);
        const auto dir = out / ("mu" + std::to_string(mu));
        fs::create_directories(dir);
        tc.checkpoint_dir = dir;
        std::printf("mu = %lld\n", mu);
        const auto result = train::train_model(gs, tc, print_record);
        train::write_metrics_csv(dir / "metrics.csv", result.records);
        write_text(dir / "summary.json", train::summary_json(result, tc));
        write_text(dir / "stats.json", graph_stats_json(gs));
        write_text(out / ("curve_mu" + std::to_string(mu) + ".csv"),
                   curve_csv(fold_mean_curve(result.records)));
        const auto summary = json::parse(train::summary_json(result, tc));
        const auto &m = summary.at("mean");
        table += std::to_string(mu) + "," + io::format_double(m.at("accuracy").get<double>()) +
                 "," + io::format_double(summary.at("std").at("accuracy").get<double>()) + "," +
                 io::format_double(m.at("precision").get<double>()) + "," +
                 io::format_double(m.at("recall").get<double>()) + "," +
                 io::format_double(m.at("specificity").get<double>()) + "\n";
    }
    write_text(out / "sweep.csv", table);
    std::printf("%s", table.c_str());
    return kOk;
}

int run(int argc, const char *const *argv) {
    CLI::App app{"Hybrid quantum-classical GNN for track-segment classification"};
    app.require_subcommand(1);
    std::string config_file;
    int threads = -1;
    app.add_option("--config", config_file, "key = value settings file");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");

    std::string footer = "Settings (override with --key=value):\n";
    for (const auto &k : config_keys()) {
        footer += "  " + std::string(k.name) + " [" + k.default_value + "]  " + k.help + "\n";
    }
    app.footer(footer);

    struct Command {
        const char *name;
        const char *help;
        int (*fn)(const RunConfig &);
    };
    static constexpr Command kCommands[] = {
        {"ingest", "convert TrackML event files into events_dir", cmd_ingest},
        {"synth", "generate synthetic events into events_dir", cmd_synth},
        {"build-graphs", "build doublet graphs from events_dir into graphs_dir", cmd_build_graphs},
        {"train", "k-fold training on graphs_dir, outputs in out_dir", cmd_train},
        {"evaluate", "score a checkpoint on graphs_dir", cmd_evaluate},
        {"report", "merge run summaries into comparison tables", cmd_report},
        {"sweep", "pileup sweep: subsample, build graphs, train per mu", cmd_sweep},
    };
    std::vector<std::pair<CLI::App *, const Command *>> subs;
    for (const auto &c : kCommands) {
        auto *sub = app.add_subcommand(c.name, c.help);
        sub->allow_extras();
        subs.emplace_back(sub, &c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig config;
        if (!config_file.empty()) {
            config.load_file(config_file);
        }
        for (const auto &[sub, cmd] : subs) {
            if (!sub->parsed()) {
                continue;
            }
            for (const auto &extra : sub->remaining()) {
                config.apply_override(extra);
            }
            if (threads >= 0) {
                config.set("threads", std::to_string(threads));
            }
            qgnn::set_thread_count(config.get_size("threads"));
            return cmd->fn(config);
        }
        return kConfigError;
    } catch (const train::NumericalError &e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalError;
    } catch (const IoError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIoError;
    } catch (const events::IngestError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIoError;
    } catch (const fs::filesystem_error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIoError;
    } catch (const std::invalid_argument &e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfigError;
    } catch (const std::runtime_error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIoError;
    }
}

} // namespace qgnn::cli
