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

#include <algorithm>
#include <string>

namespace qgnn::quantum {

void CircuitSpec::validate() const {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw QuantumError("circuit qubit count must be in [1, 12], got " + std::to_string(n_qubits));
    }
}

std::vector<Gate> CircuitSpec::gates() const {
    validate();
    std::vector<Gate> out;
    out.reserve(n_params() + n_layers);
    for (std::size_t layer = 0; layer <= n_layers; ++layer) {
        for (std::size_t q = 0; q < n_qubits; ++q) {
            out.push_back(Gate{Gate::Kind::ry, q, layer * n_qubits + q, 1.0});
        }
        if (layer < n_layers && entangler == Entangler::cz_ring && n_qubits > 1) {
            out.push_back(Gate{Gate::Kind::entangle, 0, 0, 1.0});
        }
    }
    return out;
}

void apply_gates(StateVector &state, std::span<const Gate> gates, std::span<const double> thetas) {
    for (const Gate &g : gates) {
        if (g.kind == Gate::Kind::ry) {
            state.apply_ry(g.qubit, g.sign * thetas[g.param]);
        } else {
            state.apply_cz_ring();
        }
    }
}

namespace {
void check_thetas(const CircuitSpec &circuit, std::span<const double> thetas,
                  const StateVector &state) {
    if (state.n_qubits() != circuit.n_qubits) {
        throw QuantumError("state has " + std::to_string(state.n_qubits()) +
                           " qubits, circuit expects " + std::to_string(circuit.n_qubits));
    }
    if (thetas.size() != circuit.n_params()) {
        throw QuantumError("circuit expects " + std::to_string(circuit.n_params()) +
                           " angles, got " + std::to_string(thetas.size()));
    }
}
} // namespace

StateVector run_pqc(StateVector state, const CircuitSpec &circuit, std::span<const double> thetas) {
    check_thetas(circuit, thetas, state);
    const auto gates = circuit.gates();
    apply_gates(state, gates, thetas);
    return state;
}

StateVector run_pqc_inverse(StateVector state, const CircuitSpec &circuit,
                            std::span<const double> thetas) {
    check_thetas(circuit, thetas, state);
    auto gates = circuit.gates();
    std::reverse(gates.begin(), gates.end());
    for (Gate &g : gates) {
        g.sign = -g.sign;
    }
    apply_gates(state, gates, thetas);
    return state;
}

} // namespace qgnn::quantum
