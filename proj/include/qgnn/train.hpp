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
 * Loss, adaptive-moment optimizer, k-fold cross-validation, and the
 * confusion-matrix metrics used for edge classification.
 */
#pragma once

#include "qgnn/autodiff.hpp"
#include "qgnn/graphs.hpp"
#include "qgnn/model.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgnn::train {

/// A loss or parameter turned non-finite during training.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kLossClamp = 1e-12;

/// Mean binary cross-entropy with scores clamped to [1e-12, 1 - 1e-12].
ad::Var bce_loss(ad::Var scores, std::span<const std::uint8_t> y);
double bce_value(std::span<const double> scores, std::span<const std::uint8_t> y);

struct Confusion {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    [[nodiscard]] std::size_t total() const { return tp + tn + fp + fn; }
    Confusion &operator+=(const Confusion &o);
};

struct Metrics {
    double accuracy = 1.0;
    double precision = 1.0;
    double recall = 1.0;
    double specificity = 1.0;
    /// Some ratio had a zero denominator and was reported as 1.
    bool undefined = false;
    Confusion counts;
};

/// Prediction is score >= threshold.
Confusion confusion_counts(std::span<const double> scores, std::span<const std::uint8_t> y,
                           double threshold);
Metrics metrics_from(const Confusion &c);
Metrics confusion_metrics(std::span<const double> scores, std::span<const std::uint8_t> y,
                          double threshold);

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<ad::Tensor> m;
    std::vector<ad::Tensor> v;
    std::size_t step = 0;
};

/// One bias-corrected adaptive-moment update from Parameter::grad.
void optimizer_step(ad::ParamStore &params, AdamState &state, const AdamConfig &config);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Seeded shuffle of 0..n-1 cut into k contiguous folds (sizes differ by at most 1).
std::vector<Split> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t epochs = 10;
    std::size_t k_folds = 5;
    std::size_t train_set_size = 45; ///< 0 = every graph given
    double threshold = 0.5;
    std::uint64_t seed = 1;
    model::ModelVariant variant;
    /// Folds to run (empty = all k).
    std::vector<std::size_t> folds;
    /// Fold checkpoints land here when non-empty.
    std::filesystem::path checkpoint_dir;

    void validate() const;
};

struct MetricsRecord {
    std::size_t fold = 0;
    std::size_t epoch = 0;
    std::string split; ///< "train" or "validation"
    double loss = 0.0;
    Metrics metrics;
};

struct FoldResult {
    std::size_t fold = 0;
    MetricsRecord train;
    MetricsRecord validation;
    std::string checkpoint;
};

struct TrainResult {
    std::vector<FoldResult> folds;
    std::vector<MetricsRecord> records;
};

struct Evaluation {
    double loss = 0.0; ///< mean over every edge of the set
    Metrics metrics;
};

Evaluation evaluate(model::GNN &model, std::span<const graphs::EventGraph> graphs,
                    std::span<const std::size_t> indices, double threshold);

using ProgressFn = std::function<void(const MetricsRecord &)>;

/**
 * k-fold training, one event per optimizer step. Epoch 0 records the
 * untrained model; every epoch then reshuffles its events and records
 * train and validation metrics with the updated parameters.
 */
TrainResult train_model(std::span<const graphs::EventGraph> dataset, const TrainConfig &config,
                        const ProgressFn &progress = {});

inline constexpr const char *kMetricsHeader =
    "fold,epoch,split,loss,accuracy,precision,recall,specificity";

std::string metrics_csv_row(const MetricsRecord &r);
void write_metrics_csv(const std::filesystem::path &path, std::span<const MetricsRecord> records);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path &path);

/// Per-fold final validation metrics plus their mean and sample standard deviation.
std::string summary_json(const TrainResult &result, const TrainConfig &config);

} // namespace qgnn::train
