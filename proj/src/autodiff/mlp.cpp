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
#include "qgnn/autodiff.hpp"

#include <cmath>

namespace qgnn::ad {

Activation parse_activation(std::string_view name) {
    if (name == "identity") {
        return Activation::identity;
    }
    if (name == "tanh") {
        return Activation::tanh;
    }
    if (name == "sigmoid") {
        return Activation::sigmoid;
    }
    throw std::invalid_argument("unknown activation: " + std::string{name});
}

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::identity:
        return "identity";
    case Activation::tanh:
        return "tanh";
    case Activation::sigmoid:
        return "sigmoid";
    }
    return "?";
}

void MLPSpec::validate() const {
    if (widths.size() < 2) {
        throw ShapeError("MLP needs at least an input and an output width");
    }
    for (std::size_t w : widths) {
        if (w == 0) {
            throw ShapeError("MLP widths must be positive");
        }
    }
}

std::size_t MLPSpec::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        n += widths[i] * widths[i + 1] + widths[i + 1];
    }
    return n;
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64 &rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Tensor w(fan_in, fan_out);
    for (double &v : w.values()) {
        v = dist(rng);
    }
    return w;
}

Var apply_activation(Var x, Activation a) {
    switch (a) {
    case Activation::identity:
        return x;
    case Activation::tanh:
        return tanh(x);
    case Activation::sigmoid:
        return sigmoid(x);
    }
    return x;
}

MLP::MLP(ParamStore &store, const std::string &prefix, MLPSpec spec, std::mt19937_64 &rng)
    : spec_{std::move(spec)} {
    spec_.validate();
    for (std::size_t i = 0; i + 1 < spec_.widths.size(); ++i) {
        const std::string layer = prefix + ".l" + std::to_string(i);
        weights_.push_back(
            store.add(layer + ".weight", glorot_uniform(spec_.widths[i], spec_.widths[i + 1], rng)));
        biases_.push_back(store.add(layer + ".bias", Tensor(1, spec_.widths[i + 1])));
    }
}

Var MLP::forward(Tape &tape, ParamStore &store, Var x) const {
    std::vector<Parameter *> params;
    params.reserve(2 * weights_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        params.push_back(&store.at(weights_[i]));
        params.push_back(&store.at(biases_[i]));
    }
    return mlp_forward(tape, spec_, params, x);
}

Var mlp_forward(Tape &tape, const MLPSpec &spec, std::span<Parameter *const> params, Var input) {
    spec.validate();
    const std::size_t layers = spec.widths.size() - 1;
    if (params.size() != 2 * layers) {
        throw ShapeError("mlp_forward: expected " + std::to_string(2 * layers) +
                         " parameter tensors, got " + std::to_string(params.size()));
    }
    if (input.cols() != spec.input_width()) {
        throw ShapeError("mlp_forward: input width " + std::to_string(input.cols()) +
                         " but spec expects " + std::to_string(spec.input_width()));
    }
    Var h = input;
    for (std::size_t i = 0; i < layers; ++i) {
        const Parameter &w = *params[2 * i];
        const Parameter &b = *params[2 * i + 1];
        if (w.value.rows() != spec.widths[i] || w.value.cols() != spec.widths[i + 1] ||
            b.value.rows() != 1 || b.value.cols() != spec.widths[i + 1]) {
            throw ShapeError("mlp_forward: parameter " + w.name + " does not match spec");
        }
        h = dense(h, tape.param(*params[2 * i]), tape.param(*params[2 * i + 1]));
        h = apply_activation(h, i + 1 == layers ? spec.output : spec.hidden);
    }
    return h;
}

} // namespace qgnn::ad
