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
 * Dense row-major matrices and a tape-based reverse-mode engine over them.
 * Everything is 64-bit; every value is a (rows x cols) matrix and "row-wise"
 * is the only broadcasting rule.
 */
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qgnn::ad {

class ShapeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class Tensor {
  public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_{rows}, cols_{cols}, values_(rows * cols, fill) {}
    Tensor(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Tensor column(std::span<const double> values);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] std::array<std::size_t, 2> shape() const { return {rows_, cols_}; }
    [[nodiscard]] bool empty() const { return values_.empty(); }

    double &operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * cols_, cols_};
    }

    std::span<double> values() { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    double *data() { return values_.data(); }
    [[nodiscard]] const double *data() const { return values_.data(); }

    [[nodiscard]] bool all_finite() const;
    [[nodiscard]] bool same_shape(const Tensor &other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    void fill(double v);

    bool operator==(const Tensor &) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// A named trainable tensor with its gradient accumulator.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
};

/**
 * Ordered parameter collection. Insertion order is the canonical order for
 * checkpoints, optimizer state, and deterministic gradient reduction.
 */
class ParamStore {
  public:
    std::size_t add(std::string name, Tensor init);

    Parameter &at(std::size_t id) { return params_.at(id); }
    [[nodiscard]] const Parameter &at(std::size_t id) const { return params_.at(id); }
    Parameter &at(std::string_view name);
    [[nodiscard]] const Parameter &at(std::string_view name) const;
    [[nodiscard]] bool contains(std::string_view name) const;

    [[nodiscard]] std::size_t size() const { return params_.size(); }
    [[nodiscard]] std::size_t scalar_count() const;
    void zero_grad();

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    [[nodiscard]] auto begin() const { return params_.begin(); }
    [[nodiscard]] auto end() const { return params_.end(); }

  private:
    std::vector<Parameter> params_;
    std::unordered_map<std::string, std::size_t> index_;
};

class Tape;

/// Handle to a value recorded on a tape.
class Var {
  public:
    Var() = default;
    Var(Tape *tape, std::size_t id) : tape_{tape}, id_{id} {}

    [[nodiscard]] const Tensor &value() const;
    [[nodiscard]] std::size_t rows() const { return value().rows(); }
    [[nodiscard]] std::size_t cols() const { return value().cols(); }
    [[nodiscard]] std::size_t id() const { return id_; }
    [[nodiscard]] Tape *tape() const { return tape_; }

  private:
    Tape *tape_ = nullptr;
    std::size_t id_ = 0;
};

/**
 * Records the forward computation. Nodes live in a deque so references to
 * earlier values stay valid while later ones are appended. backward() runs
 * the recorded closures in reverse creation order and finally adds the
 * gradient of every parameter leaf into Parameter::grad.
 */
class Tape {
  public:
    /// Receives the op's own output value and its accumulated gradient.
    using BackwardFn =
        std::function<void(Tape &, const Tensor &out, const Tensor &grad_out)>;

    explicit Tape(bool record_gradients = true) : record_{record_gradients} {}
    Tape(const Tape &) = delete;
    Tape &operator=(const Tape &) = delete;

    Var constant(Tensor value);
    /// Leaf that receives a gradient (inputs under test).
    Var variable(Tensor value);
    /// Leaf bound to a parameter; repeated calls reuse one node.
    Var param(Parameter &p);

    /**
     * Append an op result. `fn` is stored only if some input requires a
     * gradient and the tape is recording.
     */
    Var push(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
    Var push(Tensor value, std::span<const Var> inputs, BackwardFn fn);

    void backward(Var scalar);

    [[nodiscard]] bool recording() const { return record_; }
    [[nodiscard]] bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
    [[nodiscard]] const Tensor &value(Var v) const { return nodes_[v.id()].value; }
    /// Gradient of v after backward (empty if v received none).
    [[nodiscard]] const Tensor &grad(Var v) const { return nodes_[v.id()].grad; }
    /// Gradient buffer for accumulation, allocated to v's shape on first use.
    Tensor &grad_buffer(Var v);
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        Parameter *param = nullptr;
        BackwardFn backward;
    };

    std::deque<Node> nodes_;
    std::unordered_map<const Parameter *, std::size_t> param_nodes_;
    bool record_;
};

inline const Tensor &Var::value() const { return tape_->value(*this); }

// ---- primitive ops --------------------------------------------------------

/// Row-wise affine map: x[n x in] * W[in x out] + b[1 x out].
Var dense(Var x, Var weight, Var bias);
Var tanh(Var x);
Var sigmoid(Var x);
Var scale(Var x, double factor);
Var add(Var a, Var b);
Var mul(Var a, Var b);
/// m[n x d] with every row i multiplied by w[i] (w is n x 1).
Var mul_rows(Var m, Var w);
Var concat_cols(std::span<const Var> parts);
Var concat_cols(std::initializer_list<Var> parts);
/// out[k] = x[index[k]]
Var gather_rows(Var x, std::span<const std::uint32_t> index);
/// out[index[k]] += m[k], out has n_rows rows.
Var scatter_rows(Var m, std::span<const std::uint32_t> index, std::size_t n_rows);
Var sum(Var x);
Var mean(Var x);

// ---- multi-layer perceptrons ---------------------------------------------

enum class Activation { identity, tanh, sigmoid };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);

struct MLPSpec {
    std::vector<std::size_t> widths; ///< input, hidden..., output
    Activation hidden = Activation::tanh;
    Activation output = Activation::identity;

    void validate() const;
    [[nodiscard]] std::size_t input_width() const { return widths.front(); }
    [[nodiscard]] std::size_t output_width() const { return widths.back(); }
    [[nodiscard]] std::size_t parameter_count() const;
};

/// Registers "<prefix>.l<i>.weight" / ".bias" in the store; Glorot-uniform weights, zero bias.
class MLP {
  public:
    MLP() = default;
    MLP(ParamStore &store, const std::string &prefix, MLPSpec spec, std::mt19937_64 &rng);

    [[nodiscard]] const MLPSpec &spec() const { return spec_; }
    Var forward(Tape &tape, ParamStore &store, Var x) const;
    /// Id of the final layer's weight / bias (zero-init experiments).
    [[nodiscard]] std::size_t last_weight() const { return weights_.back(); }
    [[nodiscard]] std::size_t last_bias() const { return biases_.back(); }

  private:
    MLPSpec spec_;
    std::vector<std::size_t> weights_;
    std::vector<std::size_t> biases_;
};

Var apply_activation(Var x, Activation a);

/// Forward pass from explicit parameter tensors (weights, biases alternate per layer).
Var mlp_forward(Tape &tape, const MLPSpec &spec, std::span<Parameter *const> params, Var input);

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64 &rng);

// ---- checkpoints ----------------------------------------------------------

/**
 * Human-readable flat checkpoint: a JSON object with a free-form "meta"
 * section and "params": { name: { "shape": [r, c], "values": [...] } }.
 */
struct Checkpoint {
    std::string meta_json = "{}";
    std::vector<std::pair<std::string, Tensor>> tensors;
};

Checkpoint snapshot(const ParamStore &store, std::string meta_json = "{}");
void write_checkpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint read_checkpoint(const std::string &path);
/// Copies values by name; every store entry must be present with matching shape.
void restore(ParamStore &store, const Checkpoint &ckpt);

} // namespace qgnn::ad
