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

#include <algorithm>
#include <cmath>

namespace qgnn::ad {

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_{rows}, cols_{cols}, values_{std::move(values)} {
    if (values_.size() != rows * cols) {
        throw ShapeError("tensor value count " + std::to_string(values_.size()) +
                         " does not match shape " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? 0 : rows.begin()->size();
    std::vector<double> values;
    values.reserve(n * m);
    for (const auto &r : rows) {
        if (r.size() != m) {
            throw ShapeError("ragged rows in Tensor::from_rows");
        }
        values.insert(values.end(), r.begin(), r.end());
    }
    return {n, m, std::move(values)};
}

Tensor Tensor::column(std::span<const double> values) {
    return {values.size(), 1, std::vector<double>(values.begin(), values.end())};
}

bool Tensor::all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

std::size_t ParamStore::add(std::string name, Tensor init) {
    if (index_.contains(name)) {
        throw std::invalid_argument("duplicate parameter name: " + name);
    }
    const std::size_t id = params_.size();
    index_.emplace(name, id);
    Tensor grad(init.rows(), init.cols());
    params_.push_back(Parameter{std::move(name), std::move(init), std::move(grad)});
    return id;
}

Parameter &ParamStore::at(std::string_view name) {
    auto it = index_.find(std::string{name});
    if (it == index_.end()) {
        throw std::out_of_range("unknown parameter: " + std::string{name});
    }
    return params_[it->second];
}

const Parameter &ParamStore::at(std::string_view name) const {
    return const_cast<ParamStore *>(this)->at(name);
}

bool ParamStore::contains(std::string_view name) const {
    return index_.contains(std::string{name});
}

std::size_t ParamStore::scalar_count() const {
    std::size_t n = 0;
    for (const auto &p : params_) {
        n += p.value.size();
    }
    return n;
}

void ParamStore::zero_grad() {
    for (auto &p : params_) {
        p.grad = Tensor(p.value.rows(), p.value.cols());
    }
}

} // namespace qgnn::ad
