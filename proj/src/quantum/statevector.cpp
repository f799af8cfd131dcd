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
#include "qgnn/quantum.hpp"
#include "qgnn/kernels.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <string>

namespace qgnn::quantum {
namespace {

std::size_t bit_of(std::size_t n_qubits, std::size_t qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

// Diagonal of the CZ ring for each qubit count, expanded to interleaved
// (re, im) doubles so it can be applied with one elementwise multiply.
const std::vector<double> &cz_ring_diagonal(std::size_t n_qubits) {
    static const std::array<std::vector<double>, kMaxQubits + 1> table = [] {
        std::array<std::vector<double>, kMaxQubits + 1> t;
        for (std::size_t n = 0; n <= kMaxQubits; ++n) {
            const std::size_t dim = std::size_t{1} << n;
            const auto pairs = cz_ring_pairs(n);
            t[n].resize(2 * dim);
            for (std::size_t k = 0; k < dim; ++k) {
                double sign = 1.0;
                for (const auto &[a, b] : pairs) {
                    if ((k & bit_of(n, a)) != 0 && (k & bit_of(n, b)) != 0) {
                        sign = -sign;
                    }
                }
                t[n][2 * k] = sign;
                t[n][2 * k + 1] = sign;
            }
        }
        return t;
    }();
    return table.at(n_qubits);
}

void check_qubits(std::size_t n) {
    if (n == 0 || n > kMaxQubits) {
        throw QuantumError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                           std::to_string(n));
    }
}

void check_finite(std::span<const double> features) {
    for (double v : features) {
        if (!std::isfinite(v)) {
            throw QuantumError("non-finite feature passed to an encoding");
        }
    }
}

} // namespace

std::vector<std::pair<std::size_t, std::size_t>> cz_ring_pairs(std::size_t n_qubits) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (n_qubits == 2) {
        pairs.emplace_back(0, 1);
    } else if (n_qubits > 2) {
        for (std::size_t i = 0; i < n_qubits; ++i) {
            pairs.emplace_back(i, (i + 1) % n_qubits);
        }
    }
    return pairs;
}

StateVector::StateVector(std::size_t n_qubits) : n_qubits_{n_qubits} {
    check_qubits(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t n_qubits, std::vector<std::complex<double>> amplitudes)
    : n_qubits_{n_qubits}, amps_{std::move(amplitudes)} {
    check_qubits(n_qubits);
    if (amps_.size() != (std::size_t{1} << n_qubits)) {
        throw QuantumError("amplitude count does not match 2^n_qubits");
    }
}

void StateVector::apply_ry(std::size_t qubit, double theta) {
    if (qubit >= n_qubits_) {
        throw QuantumError("RY target out of range");
    }
    simd::active_kernels().rotate_pairs(dim(), bit_of(n_qubits_, qubit), std::cos(0.5 * theta),
                                        std::sin(0.5 * theta), raw());
}

void StateVector::apply_cz(std::size_t a, std::size_t b) {
    if (a >= n_qubits_ || b >= n_qubits_ || a == b) {
        throw QuantumError("invalid CZ qubits");
    }
    const std::size_t mask = bit_of(n_qubits_, a) | bit_of(n_qubits_, b);
    for (std::size_t k = 0; k < dim(); ++k) {
        if ((k & mask) == mask) {
            amps_[k] = -amps_[k];
        }
    }
}

void StateVector::apply_cz_ring() {
    const auto &diag = cz_ring_diagonal(n_qubits_);
    simd::active_kernels().mul_elementwise(diag.size(), diag.data(), raw());
}

double StateVector::norm_squared() const {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

// ---- encodings ------------------------------------------------------------

EncodingKind parse_encoding(std::string_view name) {
    if (name == "angle") {
        return EncodingKind::angle;
    }
    if (name == "amplitude") {
        return EncodingKind::amplitude;
    }
    if (name == "parallel") {
        return EncodingKind::parallel;
    }
    throw QuantumError("unknown encoding: " + std::string{name});
}

std::string_view to_string(EncodingKind e) {
    switch (e) {
    case EncodingKind::angle:
        return "angle";
    case EncodingKind::amplitude:
        return "amplitude";
    case EncodingKind::parallel:
        return "parallel";
    }
    return "?";
}

std::size_t encoded_qubits(EncodingKind kind, std::size_t n_features) {
    switch (kind) {
    case EncodingKind::angle:
        check_qubits(n_features);
        return n_features;
    case EncodingKind::amplitude:
    case EncodingKind::parallel: {
        if (n_features < 2 || !std::has_single_bit(n_features)) {
            throw QuantumError("amplitude encoding needs a power-of-two feature count >= 2, got " +
                               std::to_string(n_features));
        }
        const auto n = static_cast<std::size_t>(std::countr_zero(n_features));
        const std::size_t total = kind == EncodingKind::parallel ? 2 * n : n;
        check_qubits(total);
        return total;
    }
    }
    return 0;
}

StateVector angle_encode(std::span<const double> features) {
    check_qubits(features.size());
    check_finite(features);
    const std::size_t n = features.size();
    std::vector<std::complex<double>> amps(std::size_t{1} << n);
    amps[0] = 1.0;
    // build the product state qubit by qubit, most significant first
    std::size_t filled = 1;
    for (std::size_t q = 0; q < n; ++q) {
        const double c = std::cos(0.5 * features[q]);
        const double s = std::sin(0.5 * features[q]);
        for (std::size_t k = filled; k-- > 0;) {
            const std::complex<double> a = amps[k];
            amps[2 * k] = c * a;
            amps[2 * k + 1] = s * a;
        }
        filled *= 2;
    }
    return {n, std::move(amps)};
}

Encoded amplitude_encode(std::span<const double> features) {
    const std::size_t n = encoded_qubits(EncodingKind::amplitude, features.size());
    check_finite(features);
    double norm2 = 0.0;
    for (double v : features) {
        norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    if (norm <= kDegenerateNorm) {
        return {StateVector(n), true};
    }
    std::vector<std::complex<double>> amps(features.size());
    for (std::size_t k = 0; k < features.size(); ++k) {
        amps[k] = features[k] / norm;
    }
    return {StateVector(n, std::move(amps)), false};
}

Encoded parallel_encode(std::span<const double> features) {
    const std::size_t total = encoded_qubits(EncodingKind::parallel, features.size());
    Encoded single = amplitude_encode(features);
    const auto a = single.state.amplitudes();
    const std::size_t d = a.size();
    std::vector<std::complex<double>> amps(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            amps[i * d + j] = a[i] * a[j];
        }
    }
    return {StateVector(total, std::move(amps)), single.degenerate};
}

Encoded encode(EncodingKind kind, std::span<const double> features) {
    switch (kind) {
    case EncodingKind::angle:
        return {angle_encode(features), false};
    case EncodingKind::amplitude:
        return amplitude_encode(features);
    case EncodingKind::parallel:
        return parallel_encode(features);
    }
    throw QuantumError("unknown encoding");
}

// ---- readouts -------------------------------------------------------------

std::vector<double> readout_z(const StateVector &state) {
    const std::size_t n = state.n_qubits();
    std::vector<double> probs(state.dim());
    simd::active_kernels().abs2(state.dim(), state.raw(), probs.data());
    std::vector<double> z(n, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t bit = bit_of(n, q);
        double acc = 0.0;
        for (std::size_t k = 0; k < probs.size(); ++k) {
            acc += (k & bit) != 0 ? -probs[k] : probs[k];
        }
        z[q] = acc;
    }
    return z;
}

std::vector<double> readout_probs(const StateVector &state, std::span<const std::size_t> measured) {
    if (measured.empty()) {
        throw QuantumError("readout_probs needs at least one measured qubit");
    }
    const std::size_t n = state.n_qubits();
    std::size_t seen = 0;
    for (std::size_t q : measured) {
        if (q >= n) {
            throw QuantumError("measured qubit out of range");
        }
        if ((seen & (std::size_t{1} << q)) != 0) {
            throw QuantumError("measured qubit listed twice");
        }
        seen |= std::size_t{1} << q;
    }
    std::vector<double> probs(state.dim());
    simd::active_kernels().abs2(state.dim(), state.raw(), probs.data());
    const std::size_t m = measured.size();
    // leading qubits measured in order: marginal is a contiguous block sum
    bool leading = true;
    for (std::size_t i = 0; i < m; ++i) {
        leading = leading && measured[i] == i;
    }
    std::vector<double> out(std::size_t{1} << m, 0.0);
    if (leading) {
        const std::size_t block = std::size_t{1} << (n - m);
        for (std::size_t o = 0; o < out.size(); ++o) {
            double acc = 0.0;
            for (std::size_t r = 0; r < block; ++r) {
                acc += probs[o * block + r];
            }
            out[o] = acc;
        }
        return out;
    }
    for (std::size_t k = 0; k < probs.size(); ++k) {
        std::size_t o = 0;
        for (std::size_t i = 0; i < m; ++i) {
            o = (o << 1) | ((k & bit_of(n, measured[i])) != 0 ? 1 : 0);
        }
        out[o] += probs[k];
    }
    return out;
}

ReadoutKind parse_readout(std::string_view name) {
    if (name == "z") {
        return ReadoutKind::z;
    }
    if (name == "probs") {
        return ReadoutKind::probs;
    }
    if (name == "amplitude_real") {
        return ReadoutKind::amplitude_real;
    }
    throw QuantumError("unknown readout: " + std::string{name});
}

std::string_view to_string(ReadoutKind r) {
    switch (r) {
    case ReadoutKind::z:
        return "z";
    case ReadoutKind::probs:
        return "probs";
    case ReadoutKind::amplitude_real:
        return "amplitude_real";
    }
    return "?";
}

} // namespace qgnn::quantum
