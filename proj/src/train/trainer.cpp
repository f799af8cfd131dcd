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
#include "qgnn/train.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qgnn::train {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void check_finite(double loss, std::size_t fold, std::size_t epoch, std::int64_t event_id) {
    if (!std::isfinite(loss)) {
        throw NumericalError("non-finite loss in fold " + std::to_string(fold) + ", epoch " +
                             std::to_string(epoch) + ", event " + std::to_string(event_id));
    }
}

MetricsRecord make_record(std::size_t fold, std::size_t epoch, const char *split,
                          const Evaluation &e) {
    return MetricsRecord{fold, epoch, split, e.loss, e.metrics};
}

} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("learning_rate must be a finite value >= 0");
    }
    if (k_folds < 2) {
        throw std::invalid_argument("k_folds must be at least 2");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("threshold must lie in (0, 1)");
    }
    for (std::size_t f : folds) {
        if (f >= k_folds) {
            throw std::invalid_argument("fold " + std::to_string(f) + " out of range for k = " +
                                        std::to_string(k_folds));
        }
    }
}

Evaluation evaluate(model::GNN &model, std::span<const graphs::EventGraph> graphs,
                    std::span<const std::size_t> indices, double threshold) {
    Evaluation e;
    Confusion total;
    double loss_sum = 0.0;
    std::size_t n_edges = 0;
    for (std::size_t idx : indices) {
        const auto &g = graphs[idx];
        if (g.n_edges() == 0) {
            continue;
        }
        const auto scores = model.predict(g);
        loss_sum += bce_value(scores, g.y) * static_cast<double>(g.n_edges());
        n_edges += g.n_edges();
        total += confusion_counts(scores, g.y, threshold);
    }
    e.loss = n_edges ? loss_sum / static_cast<double>(n_edges) : 0.0;
    e.metrics = metrics_from(total);
    return e;
}

TrainResult train_model(std::span<const graphs::EventGraph> dataset, const TrainConfig &config,
                        const ProgressFn &progress) {
    config.validate();
    const std::size_t n = config.train_set_size == 0
                              ? dataset.size()
                              : std::min(config.train_set_size, dataset.size());
    const auto splits = kfold_split(n, config.k_folds, config.seed);
    std::vector<std::size_t> folds = config.folds;
    if (folds.empty()) {
        for (std::size_t f = 0; f < config.k_folds; ++f) {
            folds.push_back(f);
        }
    }

    TrainResult result;
    const AdamConfig adam{config.learning_rate};
    auto record = [&](MetricsRecord r) {
        if (progress) {
            progress(r);
        }
        result.records.push_back(std::move(r));
    };

    for (std::size_t fold : folds) {
        const Split &split = splits[fold];
        model::GNN model(config.variant, mix(config.seed, fold));
        AdamState state;
        std::mt19937_64 order_rng(mix(config.seed, 1000 + fold));
        std::vector<std::size_t> order = split.train;

        FoldResult fr;
        fr.fold = fold;
        for (std::size_t epoch = 0; epoch <= config.epochs; ++epoch) {
            if (epoch > 0) {
                std::shuffle(order.begin(), order.end(), order_rng);
                for (std::size_t idx : order) {
                    const auto &g = dataset[idx];
                    if (g.n_edges() == 0) {
                        continue;
                    }
                    ad::Tape tape;
                    ad::Var loss = bce_loss(model.forward(tape, g), g.y);
                    check_finite(loss.value()(0, 0), fold, epoch, g.event_id);
                    model.params().zero_grad();
                    tape.backward(loss);
                    optimizer_step(model.params(), state, adam);
                }
            }
            fr.train = make_record(fold, epoch, "train",
                                   evaluate(model, dataset, split.train, config.threshold));
            fr.validation = make_record(fold, epoch, "validation",
                                        evaluate(model, dataset, split.validation, config.threshold));
            check_finite(fr.train.loss, fold, epoch, -1);
            record(fr.train);
            record(fr.validation);
        }
        if (!config.checkpoint_dir.empty()) {
            const auto path = config.checkpoint_dir / ("fold" + std::to_string(fold) + ".json");
            model.save(path.string());
            fr.checkpoint = path.string();
        }
        result.folds.push_back(std::move(fr));
    }
    return result;
}

std::string summary_json(const TrainResult &result, const TrainConfig &config) {
    using nlohmann::json;
    static constexpr const char *kNames[] = {"accuracy", "precision", "recall", "specificity",
                                             "loss"};
    auto values = [](const MetricsRecord &r) {
        return std::array<double, 5>{r.metrics.accuracy, r.metrics.precision, r.metrics.recall,
                                     r.metrics.specificity, r.loss};
    };

    json folds = json::array();
    std::array<double, 5> sum{};
    for (const auto &f : result.folds) {
        json entry{{"fold", f.fold}, {"epoch", f.validation.epoch}};
        const auto v = values(f.validation);
        for (std::size_t i = 0; i < v.size(); ++i) {
            entry[kNames[i]] = v[i];
            sum[i] += v[i];
        }
        entry["undefined_ratio"] = f.validation.metrics.undefined;
        if (!f.checkpoint.empty()) {
            entry["checkpoint"] = f.checkpoint;
        }
        folds.push_back(std::move(entry));
    }
    const double k = static_cast<double>(result.folds.size());
    json mean = json::object();
    json stddev = json::object();
    for (std::size_t i = 0; i < sum.size(); ++i) {
        const double mu = k > 0 ? sum[i] / k : 0.0;
        double ss = 0.0;
        for (const auto &f : result.folds) {
            const double d = values(f.validation)[i] - mu;
            ss += d * d;
        }
        mean[kNames[i]] = mu;
        stddev[kNames[i]] = k > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
    }
    json doc{
        {"variant", std::string(model::to_string(config.variant.kind))},
        {"k_folds", config.k_folds},
        {"epochs", config.epochs},
        {"learning_rate", config.learning_rate},
        {"seed", config.seed},
        {"split", "validation"},
        {"folds", std::move(folds)},
        {"mean", std::move(mean)},
        {"std", std::move(stddev)},
    };
    return doc.dump(2) + "\n";
}

} // namespace qgnn::train
