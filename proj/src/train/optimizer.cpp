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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qgnn::train {

void optimizer_step(ad::ParamStore &params, AdamState &state, const AdamConfig &config) {
    if (state.m.size() != params.size()) {
        state.m.clear();
        state.v.clear();
        for (const auto &p : params) {
            state.m.emplace_back(p.value.rows(), p.value.cols());
            state.v.emplace_back(p.value.rows(), p.value.cols());
        }
        state.step = 0;
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    std::size_t i = 0;
    for (auto &p : params) {
        auto value = p.value.values();
        auto grad = p.grad.values();
        auto m = state.m[i].values();
        auto v = state.v[i].values();
        for (std::size_t j = 0; j < value.size(); ++j) {
            const double g = grad.empty() ? 0.0 : grad[j];
            m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g;
            v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g * g;
            const double m_hat = m[j] / c1;
            const double v_hat = v[j] / c2;
            value[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
        ++i;
    }
}

std::vector<Split> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) {
        throw std::invalid_argument("k_folds must be at least 2");
    }
    if (k > n) {
        throw std::invalid_argument("k_folds = " + std::to_string(k) + " exceeds dataset size " +
                                    std::to_string(n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<Split> folds(k);
    std::size_t begin = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        folds[f].validation.assign(order.begin() + begin, order.begin() + begin + size);
        begin += size;
    }
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t g = 0; g < k; ++g) {
            if (g != f) {
                folds[f].train.insert(folds[f].train.end(), folds[g].validation.begin(),
                                      folds[g].validation.end());
            }
        }
    }
    return folds;
}

} // namespace qgnn::train
