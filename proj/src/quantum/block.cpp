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
#include "qgnn/kernels.hpp"
#include "qgnn/parallel.hpp"
#include "qgnn/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace qgnn::quantum {
namespace {

std::size_t bit_of(std::size_t n_qubits, std::size_t qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

std::vector<double> readout_values(const LayerSpec &spec, const StateVector &state) {
    switch (spec.readout) {
    case ReadoutKind::z:
        return readout_z(state);
    case ReadoutKind::probs: {
        const auto measured = spec.measured_qubits();
        return readout_probs(state, measured);
    }
    case ReadoutKind::amplitude_real: {
        std::vector<double> out(state.dim());
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = state.amplitudes()[k].real();
        }
        return out;
    }
    }
    return {};
}

// d f / d(re, im) of the final state for f = <upstream, readout(state)>,
// interleaved like StateVector::raw().
std::vector<double> readout_adjoint(const LayerSpec &spec, const StateVector &state,
                                    std::span<const double> upstream) {
    const std::size_t n = state.n_qubits();
    const std::size_t dim = state.dim();
    const double *psi = state.raw();
    std::vector<double> lambda(2 * dim, 0.0);
    switch (spec.readout) {
    case ReadoutKind::z:
        for (std::size_t k = 0; k < dim; ++k) {
            double w = 0.0;
            for (std::size_t q = 0; q < n; ++q) {
                w += (k & bit_of(n, q)) != 0 ? -upstream[q] : upstream[q];
            }
            lambda[2 * k] = 2.0 * w * psi[2 * k];
            lambda[2 * k + 1] = 2.0 * w * psi[2 * k + 1];
        }
        break;
    case ReadoutKind::probs: {
        const auto measured = spec.measured_qubits();
        for (std::size_t k = 0; k < dim; ++k) {
            std::size_t o = 0;
            for (std::size_t q : measured) {
                o = (o << 1) | ((k & bit_of(n, q)) != 0 ? 1 : 0);
            }
            lambda[2 * k] = 2.0 * upstream[o] * psi[2 * k];
            lambda[2 * k + 1] = 2.0 * upstream[o] * psi[2 * k + 1];
        }
        break;
    }
    case ReadoutKind::amplitude_real:
        for (std::size_t k = 0; k < dim; ++k) {
            lambda[2 * k] = upstream[k];
        }
        break;
    }
    return lambda;
}

// Pull the real part of the encoded-state adjoint back through the
// normalization x -> x / ||x||.
void normalization_backward(std::span<const double> features, std::span<const double> d_unit,
                            std::span<double> d_features) {
    double norm2 = 0.0;
    for (double v : features) {
        norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    double proj = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        proj += features[i] / norm * d_unit[i];
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        d_features[i] = (d_unit[i] - features[i] / norm * proj) / norm;
    }
}

std::vector<double> encoding_backward(EncodingKind kind, std::span<const double> features,
                                      const std::vector<double> &lambda) {
    std::vector<double> d(features.size(), 0.0);
    switch (kind) {
    case EncodingKind::angle: {
        const std::size_t n = features.size();
        const std::size_t dim = std::size_t{1} << n;
        std::vector<double> c(n);
        std::vector<double> s(n);
        for (std::size_t q = 0; q < n; ++q) {
            c[q] = std::cos(0.5 * features[q]);
            s[q] = std::sin(0.5 * features[q]);
        }
        for (std::size_t q = 0; q < n; ++q) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                double amp = 1.0;
                for (std::size_t p = 0; p < n; ++p) {
                    const bool one = (k & bit_of(n, p)) != 0;
                    if (p == q) {
                        amp *= one ? 0.5 * c[p] : -0.5 * s[p];
                    } else {
                        amp *= one ? s[p] : c[p];
                    }
                }
                acc += lambda[2 * k] * amp;
            }
            d[q] = acc;
        }
        break;
    }
    case EncodingKind::amplitude: {
        std::vector<double> d_unit(features.size());
        for (std::size_t i = 0; i < features.size(); ++i) {
            d_unit[i] = lambda[2 * i];
        }
        normalization_backward(features, d_unit, d);
        break;
    }
    case EncodingKind::parallel: {
        const std::size_t m = features.size();
        double norm2 = 0.0;
        for (double v : features) {
            norm2 += v * v;
        }
        const double norm = std::sqrt(norm2);
        std::vector<double> unit(m);
        for (std::size_t i = 0; i < m; ++i) {
            unit[i] = features[i] / norm;
        }
        // psi[i * m + j] = a_i a_j
        std::vector<double> d_unit(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                d_unit[i] += lambda[2 * (i * m + j)] * unit[j];
                d_unit[j] += lambda[2 * (i * m + j)] * unit[i];
            }
        }
        normalization_backward(features, d_unit, d);
        break;
    }
    }
    return d;
}

double pair_cross(std::size_t dim, std::size_t stride, const double *lambda, const double *psi) {
    // sum over pairs of lambda_hi . psi_lo - lambda_lo . psi_hi
    const auto &k = simd::active_kernels();
    const std::size_t run = 2 * stride;
    double acc = 0.0;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        const double *l_lo = lambda + 2 * base;
        const double *p_lo = psi + 2 * base;
        acc += k.dot(run, l_lo + run, p_lo) - k.dot(run, l_lo, p_lo + run);
    }
    return acc;
}

} // namespace

std::size_t LayerSpec::input_width() const {
    switch (encoding) {
    case EncodingKind::angle:
        return circuit.n_qubits;
    case EncodingKind::amplitude:
        return std::size_t{1} << circuit.n_qubits;
    case EncodingKind::parallel:
        return std::size_t{1} << (circuit.n_qubits / 2);
    }
    return 0;
}

std::vector<std::size_t> LayerSpec::measured_qubits() const {
    if (!measured.empty()) {
        return measured;
    }
    std::vector<std::size_t> all(circuit.n_qubits);
    for (std::size_t q = 0; q < all.size(); ++q) {
        all[q] = q;
    }
    return all;
}

std::size_t LayerSpec::output_width() const {
    switch (readout) {
    case ReadoutKind::z:
        return circuit.n_qubits;
    case ReadoutKind::probs:
        return std::size_t{1} << measured_qubits().size();
    case ReadoutKind::amplitude_real:
        return std::size_t{1} << circuit.n_qubits;
    }
    return 0;
}

void LayerSpec::validate() const {
    circuit.validate();
    if (encoding == EncodingKind::parallel && circuit.n_qubits % 2 != 0) {
        throw QuantumError("parallel encoding needs an even qubit count");
    }
    if (encoded_qubits(encoding, input_width()) != circuit.n_qubits) {
        throw QuantumError("encoding arity does not match the circuit");
    }
    for (std::size_t q : measured) {
        if (q >= circuit.n_qubits) {
            throw QuantumError("measured qubit out of range");
        }
    }
}

LayerSpec make_layer_spec(EncodingKind encoding, std::size_t n_features, std::size_t n_layers,
                          ReadoutKind readout) {
    LayerSpec spec;
    spec.encoding = encoding;
    spec.readout = readout;
    spec.circuit.n_layers = n_layers;
    spec.circuit.n_qubits = encoded_qubits(encoding, n_features);
    if (encoding == EncodingKind::parallel && readout == ReadoutKind::probs) {
        for (std::size_t q = 0; q < spec.circuit.n_qubits / 2; ++q) {
            spec.measured.push_back(q);
        }
    }
    spec.validate();
    return spec;
}

LayerForward layer_forward(const LayerSpec &spec, std::span<const double> features,
                           std::span<const double> thetas) {
    if (features.size() != spec.input_width()) {
        throw QuantumError("layer expects " + std::to_string(spec.input_width()) +
                           " features, got " + std::to_string(features.size()));
    }
    if (thetas.size() != spec.n_params()) {
        throw QuantumError("layer expects " + std::to_string(spec.n_params()) + " angles, got " +
                           std::to_string(thetas.size()));
    }
    Encoded enc = encode(spec.encoding, features);
    if (!spec.bypass_circuit) {
        const auto gates = spec.circuit.gates();
        apply_gates(enc.state, gates, thetas);
    }
    LayerForward out;
    out.outputs = readout_values(spec, enc.state);
    out.final_state = std::move(enc.state);
    out.degenerate = enc.degenerate;
    return out;
}

LayerGrad pqc_grad_exact(const LayerSpec &spec, std::span<const double> features,
                         std::span<const double> thetas, std::span<const double> upstream) {
    const LayerForward fwd = layer_forward(spec, features, thetas);
    return pqc_grad_exact(spec, features, thetas, upstream, fwd.final_state);
}

LayerGrad pqc_grad_exact(const LayerSpec &spec, std::span<const double> features,
                         std::span<const double> thetas, std::span<const double> upstream,
                         const StateVector &final_state) {
    if (upstream.size() != spec.output_width()) {
        throw QuantumError("upstream gradient has wrong length");
    }
    LayerGrad g;
    g.d_thetas.assign(spec.n_params(), 0.0);
    std::vector<double> lambda = readout_adjoint(spec, final_state, upstream);
    StateVector psi = final_state;
    const std::size_t dim = psi.dim();
    const auto &k = simd::active_kernels();

    if (!spec.bypass_circuit) {
        const auto gates = spec.circuit.gates();
        for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
            if (it->kind == Gate::Kind::ry) {
                const std::size_t stride = bit_of(psi.n_qubits(), it->qubit);
                const double theta = it->sign * thetas[it->param];
                // d/dtheta RY(theta) = RY(pi) RY(theta) / 2, applied to the output
                g.d_thetas[it->param] += it->sign * 0.5 * pair_cross(dim, stride, lambda.data(), psi.raw());
                const double c = std::cos(0.5 * theta);
                const double s = std::sin(0.5 * theta);
                k.rotate_pairs(dim, stride, c, -s, psi.raw());
                k.rotate_pairs(dim, stride, c, -s, lambda.data());
            } else {
                psi.apply_cz_ring();
                StateVector tmp(psi.n_qubits());
                std::copy(lambda.begin(), lambda.end(), tmp.raw());
                tmp.apply_cz_ring();
                std::copy(tmp.raw(), tmp.raw() + lambda.size(), lambda.begin());
            }
        }
    }

    const Encoded enc = encode(spec.encoding, features);
    g.degenerate = enc.degenerate;
    if (enc.degenerate) {
        g.d_features.assign(features.size(), 0.0);
    } else {
        g.d_features = encoding_backward(spec.encoding, features, lambda);
    }
    return g;
}

std::vector<double> pqc_grad_parameter_shift(const LayerSpec &spec, std::span<const double> features,
                                             std::span<const double> thetas,
                                             std::span<const double> upstream) {
    if (spec.readout == ReadoutKind::amplitude_real) {
        throw QuantumError("parameter shift needs an expectation-valued readout");
    }
    if (upstream.size() != spec.output_width()) {
        throw QuantumError("upstream gradient has wrong length");
    }
    auto objective = [&](std::span<const double> t) {
        const auto out = layer_forward(spec, features, t).outputs;
        double f = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            f += upstream[i] * out[i];
        }
        return f;
    };
    std::vector<double> shifted(thetas.begin(), thetas.end());
    std::vector<double> grad(thetas.size(), 0.0);
    if (spec.bypass_circuit) {
        return grad;
    }
    constexpr double shift = std::numbers::pi / 2.0;
    for (std::size_t p = 0; p < thetas.size(); ++p) {
        shifted[p] = thetas[p] + shift;
        const double plus = objective(shifted);
        shifted[p] = thetas[p] - shift;
        const double minus = objective(shifted);
        shifted[p] = thetas[p];
        grad[p] = 0.5 * (plus - minus);
    }
    return grad;
}

ad::Var quantum_layer(ad::Var input, ad::Var thetas, const LayerSpec &spec,
                      std::atomic<std::size_t> *circuit_counter) {
    spec.validate();
    const ad::Tensor &X = input.value();
    const ad::Tensor &T = thetas.value();
    if (X.cols() != spec.input_width()) {
        throw ad::ShapeError("quantum_layer: input width " + std::to_string(X.cols()) +
                             ", encoding expects " + std::to_string(spec.input_width()));
    }
    if (T.size() != spec.n_params()) {
        throw ad::ShapeError("quantum_layer: expected " + std::to_string(spec.n_params()) +
                             " angles");
    }
    ad::Tape &tape = *input.tape();
    const std::size_t rows = X.rows();
    const bool keep_states =
        tape.recording() && (tape.requires_grad(input) || tape.requires_grad(thetas));
    auto states = std::make_shared<std::vector<StateVector>>();
    if (keep_states) {
        states->assign(rows, StateVector(1));
    }
    ad::Tensor Y(rows, spec.output_width());
    parallel_for(rows, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            LayerForward fwd = layer_forward(spec, X.row(r), T.values());
            std::copy(fwd.outputs.begin(), fwd.outputs.end(), Y.row(r).begin());
            if (keep_states) {
                (*states)[r] = std::move(fwd.final_state);
            }
        }
    });
    if (circuit_counter != nullptr) {
        circuit_counter->fetch_add(rows);
    }
    return tape.push(
        std::move(Y), {input, thetas},
        [input, thetas, spec, states](ad::Tape &t, const ad::Tensor &, const ad::Tensor &G) {
            const ad::Tensor &X = t.value(input);
            const ad::Tensor &T = t.value(thetas);
            const std::size_t rows = X.rows();
            ad::Tensor d_thetas(rows, spec.n_params());
            ad::Tensor d_input(rows, X.cols());
            parallel_for(rows, [&](std::size_t begin, std::size_t end) {
                for (std::size_t r = begin; r < end; ++r) {
                    const LayerGrad g =
                        pqc_grad_exact(spec, X.row(r), T.values(), G.row(r), (*states)[r]);
                    std::copy(g.d_thetas.begin(), g.d_thetas.end(), d_thetas.row(r).begin());
                    std::copy(g.d_features.begin(), g.d_features.end(), d_input.row(r).begin());
                }
            });
            if (t.requires_grad(input)) {
                ad::Tensor &gx = t.grad_buffer(input);
                for (std::size_t i = 0; i < gx.size(); ++i) {
                    gx.values()[i] += d_input.values()[i];
                }
            }
            if (t.requires_grad(thetas)) {
                ad::Tensor &gt = t.grad_buffer(thetas);
                for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t p = 0; p < spec.n_params(); ++p) {
                        gt.values()[p] += d_thetas(r, p);
                    }
                }
            }
        });
}

} // namespace qgnn::quantum
