// Copyright 2026 The qtnseq Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qtn {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

enum class GateKind { Ry, Rz, Rx, H, CRx, CRz, CNOT };

inline bool is_two_qubit(GateKind k) {
    return k == GateKind::CRx || k == GateKind::CRz || k == GateKind::CNOT;
}

inline bool is_parameterized(GateKind k) {
    return k != GateKind::H && k != GateKind::CNOT;
}

const char* to_string(GateKind k);

/// One gate of a symbolic circuit. q0 is the (only or control) qubit, q1 the
/// target of a two-qubit gate (-1 otherwise). `slot` indexes the owning
/// box's parameter vector, -1 for parameter-free gates.
struct Gate {
    GateKind kind;
    int q0;
    int q1 = -1;
    int slot = -1;
};

/// Symbolic gate list over n_qubits local wires with n_params dense slots.
struct GateSequence {
    int n_qubits = 0;
    int n_params = 0;
    std::vector<Gate> gates;
};

// Matrix conventions: R_a(t) = exp(-i t A/2); controlled gates act on the
// ordered pair (control, target) with basis |control target>.
Eigen::Matrix2cd gate_matrix_1q(GateKind k, double angle);
Eigen::Matrix4cd gate_matrix_2q(GateKind k, double angle);

// d/dtheta of the matrices above (zero matrix for parameter-free kinds).
Eigen::Matrix2cd gate_derivative_1q(GateKind k, double angle);
Eigen::Matrix4cd gate_derivative_2q(GateKind k, double angle);

} // namespace qtn
