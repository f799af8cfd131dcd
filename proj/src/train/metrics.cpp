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
#include "qgnn/csv.hpp"
#include "qgnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace qgnn::train {

namespace {

void require_same_length(std::size_t scores, std::size_t labels) {
    if (scores != labels) {
        throw ad::ShapeError("loss: " + std::to_string(scores) + " scores for " +
                             std::to_string(labels) + " labels");
    }
}

double ratio(std::size_t num, std::size_t den, bool &undefined) {
    if (den == 0) {
        undefined = true;
        return 1.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

double bce_value(std::span<const double> scores, std::span<const std::uint8_t> y) {
    require_same_length(scores.size(), y.size());
    if (scores.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const double s = std::clamp(scores[k], kLossClamp, 1.0 - kLossClamp);
        total -= y[k] ? std::log(s) : std::log1p(-s);
    }
    return total / static_cast<double>(scores.size());
}

ad::Var bce_loss(ad::Var scores, std::span<const std::uint8_t> y) {
    const ad::Tensor &s = scores.value();
    if (s.cols() != 1) {
        throw ad::ShapeError("bce_loss: scores must be a column");
    }
    require_same_length(s.rows(), y.size());
    ad::Tensor out(1, 1, bce_value(s.values(), y));
    std::vector<std::uint8_t> labels(y.begin(), y.end());
    return scores.tape()->push(
        std::move(out), {scores},
        [scores, labels = std::move(labels)](ad::Tape &t, const ad::Tensor &, const ad::Tensor &g) {
            const ad::Tensor &s = t.value(scores);
            ad::Tensor &gs = t.grad_buffer(scores);
            const double n = static_cast<double>(labels.size());
            for (std::size_t k = 0; k < labels.size(); ++k) {
                const double v = s(k, 0);
                if (v < kLossClamp || v > 1.0 - kLossClamp) {
                    continue;
                }
                const double d = labels[k] ? -1.0 / v : 1.0 / (1.0 - v);
                gs(k, 0) += g(0, 0) * d / n;
            }
        });
}

Confusion &Confusion::operator+=(const Confusion &o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
}

Confusion confusion_counts(std::span<const double> scores, std::span<const std::uint8_t> y,
                           double threshold) {
    require_same_length(scores.size(), y.size());
    Confusion c;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const bool pred = scores[k] >= threshold;
        if (y[k]) {
            ++(pred ? c.tp : c.fn);
        } else {
            ++(pred ? c.fp : c.tn);
        }
    }
    return c;
}

Metrics metrics_from(const Confusion &c) {
    Metrics m;
    m.counts = c;
    m.accuracy = ratio(c.tp + c.tn, c.total(), m.undefined);
    m.precision = ratio(c.tp, c.tp + c.fp, m.undefined);
    m.recall = ratio(c.tp, c.tp + c.fn, m.undefined);
    m.specificity = ratio(c.tn, c.tn + c.fp, m.undefined);
    return m;
}

Metrics confusion_metrics(std::span<const double> scores, std::span<const std::uint8_t> y,
                          double threshold) {
    return metrics_from(confusion_counts(scores, y, threshold));
}

std::string metrics_csv_row(const MetricsRecord &r) {
    using io::format_double;
    return std::to_string(r.fold) + "," + std::to_string(r.epoch) + "," + r.split + "," +
           format_double(r.loss) + "," + format_double(r.metrics.accuracy) + "," +
           format_double(r.metrics.precision) + "," + format_double(r.metrics.recall) + "," +
           format_double(r.metrics.specificity);
}

void write_metrics_csv(const std::filesystem::path &path, std::span<const MetricsRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << kMetricsHeader << '\n';
    for (const auto &r : records) {
        out << metrics_csv_row(r) << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path &path) {
    io::CsvReader csv(path);
    const auto c_fold = csv.column("fold");
    const auto c_epoch = csv.column("epoch");
    const auto c_split = csv.column("split");
    const auto c_loss = csv.column("loss");
    const auto c_acc = csv.column("accuracy");
    const auto c_prec = csv.column("precision");
    const auto c_rec = csv.column("recall");
    const auto c_spec = csv.column("specificity");
    std::vector<MetricsRecord> out;
    while (csv.next()) {
        MetricsRecord r;
        r.fold = static_cast<std::size_t>(csv.get_int(c_fold));
        r.epoch = static_cast<std::size_t>(csv.get_int(c_epoch));
        r.split = std::string(csv.get(c_split));
        r.loss = csv.get_double(c_loss);
        r.metrics.accuracy = csv.get_double(c_acc);
        r.metrics.precision = csv.get_double(c_prec);
        r.metrics.recall = csv.get_double(c_rec);
        r.metrics.specificity = csv.get_double(c_spec);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace qgnn::train
