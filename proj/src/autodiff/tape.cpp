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

#include <cassert>

namespace qgnn::ad {

Var Tape::constant(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, false, nullptr, {}});
    return {this, nodes_.size() - 1};
}

Var Tape::variable(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, record_, nullptr, {}});
    return {this, nodes_.size() - 1};
}

Var Tape::param(Parameter &p) {
    if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) {
        return {this, it->second};
    }
    nodes_.push_back(Node{p.value, {}, record_, &p, {}});
    const std::size_t id = nodes_.size() - 1;
    param_nodes_.emplace(&p, id);
    return {this, id};
}

Var Tape::push(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
    return push(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(fn));
}

Var Tape::push(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
    assert(value.all_finite() && "non-finite value recorded on tape");
    bool needs = false;
    if (record_) {
        for (const Var &in : inputs) {
            needs = needs || nodes_[in.id()].requires_grad;
        }
    }
    nodes_.push_back(Node{std::move(value), {}, needs, nullptr, needs ? std::move(fn) : BackwardFn{}});
    return {this, nodes_.size() - 1};
}

Tensor &Tape::grad_buffer(Var v) {
    Node &node = nodes_[v.id()];
    if (node.grad.empty() && !node.value.empty()) {
        node.grad = Tensor(node.value.rows(), node.value.cols());
    }
    return node.grad;
}

void Tape::backward(Var scalar) {
    const Tensor &out = value(scalar);
    if (out.rows() != 1 || out.cols() != 1) {
        throw ShapeError("backward() needs a 1x1 scalar, got " + std::to_string(out.rows()) +
                         "x" + std::to_string(out.cols()));
    }
    if (!record_) {
        throw std::logic_error("backward() on a tape created without gradient recording");
    }
    grad_buffer(scalar)(0, 0) = 1.0;
    for (std::size_t i = scalar.id() + 1; i-- > 0;) {
        Node &node = nodes_[i];
        if (node.backward && !node.grad.empty()) {
            node.backward(*this, node.value, node.grad);
        }
    }
    for (auto &node : nodes_) {
        if (node.param != nullptr && !node.grad.empty()) {
            Tensor &acc = node.param->grad;
            if (!acc.same_shape(node.grad)) {
                acc = Tensor(node.grad.rows(), node.grad.cols());
            }
            auto dst = acc.values();
            auto src = node.grad.values();
            for (std::size_t k = 0; k < dst.size(); ++k) {
                dst[k] += src[k];
            }
        }
    }
}

} // namespace qgnn::ad
