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
 * Exact statevector simulation of the RY / controlled-Z ansatz, the three
 * classical-to-quantum encodings, the two readouts, and both gradient
 * routes (adjoint reverse mode and the parameter-shift rule).
 *
 * Wire 0 is the most significant bit of the basis index.
 */
#pragma once

#include "qgnn/autodiff.hpp"

#include <atomic>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace qgnn::quantum {

inline constexpr std::size_t kMaxQubits = 12;
/// Amplitude-encoding inputs with an L2 norm at or below this are degenerate.
inline constexpr double kDegenerateNorm = 1e-12;

class QuantumError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(std::size_t n_qubits);
    StateVector(std::size_t n_qubits, std::vector<std::complex<double>> amplitudes);

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }
    [[nodiscard]] std::span<const std::complex<double>> amplitudes() const { return amps_; }
    std::span<std::complex<double>> amplitudes() { return amps_; }

    /// Interleaved (re, im) view, 2 * dim() doubles.
    double *raw() { return reinterpret_cast<double *>(amps_.data()); }
    [[nodiscard]] const double *raw() const { return reinterpret_cast<const double *>(amps_.data()); }

    void apply_ry(std::size_t qubit, double theta);
    void apply_cz(std::size_t a, std::size_t b);
    /// Multiply by the diagonal of a controlled-Z ring (see cz_ring_pairs).
    void apply_cz_ring();

    [[nodiscard]] double norm_squared() const;

  private:
    std::size_t n_qubits_;
    std::vector<std::complex<double>> amps_;
};

/// Pairs acted on by the entangling ring: none for 1 qubit, a single CZ for
/// 2 (a 2-ring would apply the same gate twice), (i, i+1 mod n) otherwise.
std::vector<std::pair<std::size_t, std::size_t>> cz_ring_pairs(std::size_t n_qubits);

enum class Entangler { cz_ring, none };

struct Gate {
    enum class Kind { ry, entangle };
    Kind kind;
    std::size_t qubit = 0;     ///< ry only
    std::size_t param = 0;     ///< index into the theta array, ry only
    double sign = 1.0;         ///< -1 in inverted circuits
};

/**
 * Layered ansatz: per layer an RY on every qubit followed by the entangler,
 * then one closing RY layer. Theta layout is (layer, qubit) row-major with
 * the closing layer last, n_qubits * (n_layers + 1) angles in total.
 */
struct CircuitSpec {
    std::size_t n_qubits = 4;
    std::size_t n_layers = 3;
    Entangler entangler = Entangler::cz_ring;

    [[nodiscard]] std::size_t n_params() const { return n_qubits * (n_layers + 1); }
    [[nodiscard]] std::vector<Gate> gates() const;
    void validate() const;
};

/// Apply gates in order; thetas are indexed through Gate::param and Gate::sign.
void apply_gates(StateVector &state, std::span<const Gate> gates, std::span<const double> thetas);

StateVector run_pqc(StateVector state, const CircuitSpec &circuit, std::span<const double> thetas);
/// The inverse circuit: reversed order, negated angles.
StateVector run_pqc_inverse(StateVector state, const CircuitSpec &circuit,
                            std::span<const double> thetas);

// ---- encodings ------------------------------------------------------------

enum class EncodingKind { angle, amplitude, parallel };

EncodingKind parse_encoding(std::string_view name);
std::string_view to_string(EncodingKind e);

struct Encoded {
    StateVector state;
    bool degenerate = false;
};

/// tensor product of RY(x_i)|0>.
StateVector angle_encode(std::span<const double> features);
/// x / ||x||; |0...0> and degenerate=true when ||x|| <= kDegenerateNorm.
Encoded amplitude_encode(std::span<const double> features);
/// amplitude_encode(x) tensored with itself, on twice the qubits.
Encoded parallel_encode(std::span<const double> features);

Encoded encode(EncodingKind kind, std::span<const double> features);
/// Qubits the encoding produces for a given feature count (throws on bad arity).
std::size_t encoded_qubits(EncodingKind kind, std::size_t n_features);

// ---- readouts -------------------------------------------------------------

std::vector<double> readout_z(const StateVector &state);
/// Marginal distribution over `measured`; the first listed qubit is the most
/// significant bit of the output index.
std::vector<double> readout_probs(const StateVector &state, std::span<const std::size_t> measured);

enum class ReadoutKind {
    z,             ///< <Z_q> for every qubit
    probs,         ///< basis probabilities over the measured qubits
    amplitude_real ///< Re(amplitude) of every basis state (experimental)
};

ReadoutKind parse_readout(std::string_view name);
std::string_view to_string(ReadoutKind r);

// ---- hybrid layer ---------------------------------------------------------

/**
 * One classical-to-quantum-to-classical hop: encode a feature row, run the
 * ansatz, read out. `bypass_circuit` replaces the circuit with the identity
 * (readout of the encoded state itself).
 */
struct LayerSpec {
    EncodingKind encoding = EncodingKind::angle;
    CircuitSpec circuit;
    ReadoutKind readout = ReadoutKind::z;
    std::vector<std::size_t> measured; ///< probs readout; empty = all qubits
    bool bypass_circuit = false;

    [[nodiscard]] std::size_t input_width() const;
    [[nodiscard]] std::size_t output_width() const;
    [[nodiscard]] std::size_t n_params() const { return circuit.n_params(); }
    [[nodiscard]] std::vector<std::size_t> measured_qubits() const;
    void validate() const;
};

/// Width-matched defaults: angle on n qubits, amplitude on log2(n), parallel on 2*log2(n).
LayerSpec make_layer_spec(EncodingKind encoding, std::size_t n_features, std::size_t n_layers,
                          ReadoutKind readout);

struct LayerForward {
    std::vector<double> outputs;
    StateVector final_state{1};
    bool degenerate = false;
};

LayerForward layer_forward(const LayerSpec &spec, std::span<const double> features,
                           std::span<const double> thetas);

struct LayerGrad {
    std::vector<double> d_thetas;
    std::vector<double> d_features;
    bool degenerate = false;
};

/**
 * Reverse-mode gradient of f = <upstream, readout(circuit(encode(x)))> with
 * respect to the angles and the input features, propagated through the
 * encoding. For a degenerate amplitude input the feature gradient is zero.
 */
LayerGrad pqc_grad_exact(const LayerSpec &spec, std::span<const double> features,
                         std::span<const double> thetas, std::span<const double> upstream);
/// Same, reusing the final state from a recorded forward pass.
LayerGrad pqc_grad_exact(const LayerSpec &spec, std::span<const double> features,
                         std::span<const double> thetas, std::span<const double> upstream,
                         const StateVector &final_state);

/// Two-point shift rule, (f(t + pi/2) - f(t - pi/2)) / 2 per angle. Needs an
/// expectation-valued readout (z or probs).
std::vector<double> pqc_grad_parameter_shift(const LayerSpec &spec, std::span<const double> features,
                                             std::span<const double> thetas,
                                             std::span<const double> upstream);

/**
 * Tape op applying the layer to every row of `input` with shared angles
 * `thetas` (1 x n_params). Rows are evaluated as an ordered parallel map.
 * `circuit_counter`, when given, is incremented once per row.
 */
ad::Var quantum_layer(ad::Var input, ad::Var thetas, const LayerSpec &spec,
                      std::atomic<std::size_t> *circuit_counter = nullptr);

} // namespace qgnn::quantum
