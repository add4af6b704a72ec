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

#include <cstddef>
#include <span>
#include <vector>

#include "qtnseq/gates.hpp"

// Dense state-vector and density-matrix kernels.
//
// Bit convention: qubit 0 is the MOST significant bit of a basis index, so
// wires read left-to-right map onto qubits in index order and appending a
// fresh wire on the right shifts existing indices up by its width.

namespace qtn {

inline std::size_t dim_of(int n_qubits) {
    return std::size_t{1} << n_qubits;
}

inline int bit_of(std::size_t index, int qubit, int n_qubits) {
    return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1u);
}

template <class Vec>
void apply_1q(Vec&& v, int n, const Eigen::Matrix2cd& g, int target) {
    const std::size_t dim = dim_of(n);
    const std::size_t s = std::size_t{1} << (n - 1 - target);
    for (std::size_t base = 0; base < dim; base += 2 * s) {
        for (std::size_t j = base; j < base + s; ++j) {
            const Complex a = v(j);
            const Complex b = v(j + s);
            v(j) = g(0, 0) * a + g(0, 1) * b;
            v(j + s) = g(1, 0) * a + g(1, 1) * b;
        }
    }
}

/// Two-qubit gate on the ordered pair (qa, qb); the gate's own basis is
/// |qa qb>.
template <class Vec>
void apply_2q(Vec&& v, int n, const Eigen::Matrix4cd& g, int qa, int qb) {
    const std::size_t dim = dim_of(n);
    const std::size_t sa = std::size_t{1} << (n - 1 - qa);
    const std::size_t sb = std::size_t{1} << (n - 1 - qb);
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & sa) != 0 || (i & sb) != 0) {
            continue;
        }
        const std::size_t i00 = i;
        const std::size_t i01 = i | sb;
        const std::size_t i10 = i | sa;
        const std::size_t i11 = i | sa | sb;
        const Complex a = v(i00);
        const Complex b = v(i01);
        const Complex c = v(i10);
        const Complex d = v(i11);
        v(i00) = g(0, 0) * a + g(0, 1) * b + g(0, 2) * c + g(0, 3) * d;
        v(i01) = g(1, 0) * a + g(1, 1) * b + g(1, 2) * c + g(1, 3) * d;
        v(i10) = g(2, 0) * a + g(2, 1) * b + g(2, 2) * c + g(2, 3) * d;
        v(i11) = g(3, 0) * a + g(3, 1) * b + g(3, 2) * c + g(3, 3) * d;
    }
}

/// Dense w-qubit operator applied at arbitrary qubit positions. `op` is
/// 2^w x 2^w over basis |qubits[0] ... qubits[w-1]> and need not be unitary.
template <class Vec>
void apply_dense(Vec&& v, int n, const MatrixXc& op,
                 std::span<const int> qubits) {
    const int w = static_cast<int>(qubits.size());
    const std::size_t dim = dim_of(n);
    const std::size_t sub = dim_of(w);
    std::vector<std::size_t> stride(w);
    std::size_t mask = 0;
    for (int k = 0; k < w; ++k) {
        stride[k] = std::size_t{1} << (n - 1 - qubits[k]);
        mask |= stride[k];
    }
    // offset of sub-index j relative to a base index with all targets clear
    std::vector<std::size_t> offset(sub, 0);
    for (std::size_t j = 0; j < sub; ++j) {
        for (int k = 0; k < w; ++k) {
            if ((j >> (w - 1 - k)) & 1u) {
                offset[j] |= stride[k];
            }
        }
    }
    std::vector<Complex> buf(sub);
    for (std::size_t base = 0; base < dim; ++base) {
        if ((base & mask) != 0) {
            continue;
        }
        for (std::size_t j = 0; j < sub; ++j) {
            buf[j] = v(base | offset[j]);
        }
        for (std::size_t r = 0; r < sub; ++r) {
            Complex acc{0.0, 0.0};
            for (std::size_t c = 0; c < sub; ++c) {
                acc += op(r, c) * buf[c];
            }
            v(base | offset[r]) = acc;
        }
    }
}

/// rho <- A rho B^dagger, with A and B supplied as column-wise appliers.
template <class ApplyA, class ApplyB>
void sandwich(MatrixXc& rho, ApplyA&& apply_a, ApplyB&& apply_b) {
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        apply_a(rho.col(c));
    }
    rho.adjointInPlace();
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        apply_b(rho.col(c));
    }
    rho.adjointInPlace();
}

/// psi tensor |0...0> over q fresh qubits appended on the right.
inline VectorXc introduce_qubits(const VectorXc& psi, int q) {
    VectorXc out = VectorXc::Zero(psi.size() << q);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        out(i << q) = psi(i);
    }
    return out;
}

inline MatrixXc introduce_qubits(const MatrixXc& rho, int q) {
    MatrixXc out = MatrixXc::Zero(rho.rows() << q, rho.cols() << q);
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            out(i << q, j << q) = rho(i, j);
        }
    }
    return out;
}

namespace detail {

/// Bit positions (shift amounts) of the kept and removed qubits.
struct RemovalPlan {
    std::vector<std::size_t> kept_stride;    // MSB-first over kept qubits
    std::vector<std::size_t> removed_stride; // MSB-first over removed qubits
    int n_before = 0;
};

inline RemovalPlan removal_plan(int n, std::span<const int> removed) {
    RemovalPlan plan;
    plan.n_before = n;
    std::vector<bool> gone(n, false);
    for (int q : removed) {
        gone[q] = true;
    }
    for (int q = 0; q < n; ++q) {
        const std::size_t s = std::size_t{1} << (n - 1 - q);
        if (gone[q]) {
            plan.removed_stride.push_back(s);
        } else {
            plan.kept_stride.push_back(s);
        }
    }
    return plan;
}

/// Original index for compact kept-value `a` and removed-value `beta`.
inline std::size_t scatter(const RemovalPlan& p, std::size_t a,
                           std::size_t beta) {
    std::size_t idx = 0;
    const int nk = static_cast<int>(p.kept_stride.size());
    for (int k = 0; k < nk; ++k) {
        if ((a >> (nk - 1 - k)) & 1u) {
            idx |= p.kept_stride[k];
        }
    }
    const int nr = static_cast<int>(p.removed_stride.size());
    for (int t = 0; t < nr; ++t) {
        if ((beta >> (nr - 1 - t)) & 1u) {
            idx |= p.removed_stride[t];
        }
    }
    return idx;
}

} // namespace detail

/// Projects the given qubits onto <0| and removes them; the result is NOT
/// renormalized (its squared norm is the postselection weight).
inline VectorXc project_zero_remove(const VectorXc& psi, int n,
                                    std::span<const int> qubits) {
    const auto plan = detail::removal_plan(n, qubits);
    const std::size_t dim_new = dim_of(n - static_cast<int>(qubits.size()));
    VectorXc out(dim_new);
    for (std::size_t a = 0; a < dim_new; ++a) {
        out(a) = psi(detail::scatter(plan, a, 0));
    }
    return out;
}

/// Adjoint of project_zero_remove: embeds back with zeros elsewhere.
inline VectorXc project_zero_adjoint(const VectorXc& lambda, int n_before,
                                     std::span<const int> qubits) {
    const auto plan = detail::removal_plan(n_before, qubits);
    VectorXc out = VectorXc::Zero(dim_of(n_before));
    for (Eigen::Index a = 0; a < lambda.size(); ++a) {
        out(detail::scatter(plan, static_cast<std::size_t>(a), 0)) = lambda(a);
    }
    return out;
}

/// Partial trace over the given qubits.
inline MatrixXc partial_trace(const MatrixXc& rho, int n,
                              std::span<const int> qubits) {
    const auto plan = detail::removal_plan(n, qubits);
    const std::size_t dim_new = dim_of(n - static_cast<int>(qubits.size()));
    const std::size_t dim_tr = dim_of(static_cast<int>(qubits.size()));
    MatrixXc out = MatrixXc::Zero(dim_new, dim_new);
    for (std::size_t a = 0; a < dim_new; ++a) {
        for (std::size_t b = 0; b < dim_new; ++b) {
            Complex acc{0.0, 0.0};
            for (std::size_t t = 0; t < dim_tr; ++t) {
                acc += rho(detail::scatter(plan, a, t),
                           detail::scatter(plan, b, t));
            }
            out(a, b) = acc;
        }
    }
    return out;
}

/// Adjoint of partial_trace: lambda tensor identity on the traced qubits.
inline MatrixXc partial_trace_adjoint(const MatrixXc& lambda, int n_before,
                                      std::span<const int> qubits) {
    const auto plan = detail::removal_plan(n_before, qubits);
    const std::size_t dim_tr = dim_of(static_cast<int>(qubits.size()));
    MatrixXc out = MatrixXc::Zero(dim_of(n_before), dim_of(n_before));
    for (Eigen::Index a = 0; a < lambda.rows(); ++a) {
        for (Eigen::Index b = 0; b < lambda.cols(); ++b) {
            for (std::size_t t = 0; t < dim_tr; ++t) {
                out(detail::scatter(plan, static_cast<std::size_t>(a), t),
                    detail::scatter(plan, static_cast<std::size_t>(b), t)) =
                    lambda(a, b);
            }
        }
    }
    return out;
}

/// Adjoint of introduce_qubits.
inline VectorXc introduce_adjoint(const VectorXc& lambda, int q) {
    VectorXc out(lambda.size() >> q);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out(i) = lambda(i << q);
    }
    return out;
}

inline MatrixXc introduce_adjoint(const MatrixXc& lambda, int q) {
    MatrixXc out(lambda.rows() >> q, lambda.cols() >> q);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            out(i, j) = lambda(i << q, j << q);
        }
    }
    return out;
}

/// Full 2^n x 2^n embedding of a dense w-qubit operator.
inline MatrixXc embed_operator(const MatrixXc& op, std::span<const int> qubits,
                               int n) {
    const int w = static_cast<int>(qubits.size());
    const std::size_t dim = dim_of(n);
    const std::size_t sub = dim_of(w);
    MatrixXc out = MatrixXc::Zero(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        std::size_t r_sub = 0;
        for (int k = 0; k < w; ++k) {
            r_sub = (r_sub << 1) | static_cast<std::size_t>(
                                       bit_of(r, qubits[k], n));
        }
        for (std::size_t c_sub = 0; c_sub < sub; ++c_sub) {
            std::size_t c = r;
            for (int k = 0; k < w; ++k) {
                const std::size_t s = std::size_t{1} << (n - 1 - qubits[k]);
                if ((c_sub >> (w - 1 - k)) & 1u) {
                    c |= s;
                } else {
                    c &= ~s;
                }
            }
            out(r, c) = op(r_sub, c_sub);
        }
    }
    return out;
}

} // namespace qtn
