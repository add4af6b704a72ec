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

#include "qtnseq/gates.hpp"

#include <cmath>

namespace qtn {

namespace {
constexpr Complex kI{0.0, 1.0};
}

const char* to_string(GateKind k) {
    switch (k) {
    case GateKind::Ry:
        return "ry";
    case GateKind::Rz:
        return "rz";
    case GateKind::Rx:
        return "rx";
    case GateKind::H:
        return "h";
    case GateKind::CRx:
        return "crx";
    case GateKind::CRz:
        return "crz";
    case GateKind::CNOT:
        return "cnot";
    }
    return "?";
}

Eigen::Matrix2cd gate_matrix_1q(GateKind k, double angle) {
    Eigen::Matrix2cd m;
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    switch (k) {
    case GateKind::Ry:
        m << c, -s, s, c;
        return m;
    case GateKind::Rx:
        m << c, -kI * s, -kI * s, c;
        return m;
    case GateKind::Rz:
        m << std::exp(-kI * (angle / 2.0)), 0.0, 0.0,
            std::exp(kI * (angle / 2.0));
        return m;
    case GateKind::H: {
        const double r = 1.0 / std::sqrt(2.0);
        m << r, r, r, -r;
        return m;
    }
    default:
        break;
    }
    m.setZero();
    return m;
}

Eigen::Matrix4cd gate_matrix_2q(GateKind k, double angle) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
    switch (k) {
    case GateKind::CRx:
        m.block<2, 2>(2, 2) = gate_matrix_1q(GateKind::Rx, angle);
        return m;
    case GateKind::CRz:
        m.block<2, 2>(2, 2) = gate_matrix_1q(GateKind::Rz, angle);
        return m;
    case GateKind::CNOT:
        m.block<2, 2>(2, 2) << 0, 1, 1, 0;
        return m;
    default:
        break;
    }
    m.setZero();
    return m;
}

Eigen::Matrix2cd gate_derivative_1q(GateKind k, double angle) {
    Eigen::Matrix2cd m;
    const double c = 0.5 * std::cos(angle / 2.0);
    const double s = 0.5 * std::sin(angle / 2.0);
    switch (k) {
    case GateKind::Ry:
        m << -s, -c, c, -s;
        return m;
    case GateKind::Rx:
        m << -s, -kI * c, -kI * c, -s;
        return m;
    case GateKind::Rz:
        m << -kI * 0.5 * std::exp(-kI * (angle / 2.0)), 0.0, 0.0,
            kI * 0.5 * std::exp(kI * (angle / 2.0));
        return m;
    default:
        break;
    }
    m.setZero();
    return m;
}

Eigen::Matrix4cd gate_derivative_2q(GateKind k, double angle) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    switch (k) {
    case GateKind::CRx:
        m.block<2, 2>(2, 2) = gate_derivative_1q(GateKind::Rx, angle);
        return m;
    case GateKind::CRz:
        m.block<2, 2>(2, 2) = gate_derivative_1q(GateKind::Rz, angle);
        return m;
    default:
        break;
    }
    return m;
}

} // namespace qtn
