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

#include "qtnseq/grad.hpp"

#include <algorithm>
#include <cmath>

#include "qtnseq/error.hpp"
#include "qtnseq/linalg.hpp"
#include "qtnseq/rng.hpp"

namespace qtn {

namespace {

constexpr double kProbClamp = 1e-7;

double clamp_prob(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

/// dL/dp0 and dL/dp1 of the clamped BCE at the RAW (pre-normalization)
/// probabilities; the normalization p_hat = p / (p0+p1) is chained here.
struct LossCoeffs {
    double g0;
    double g1;
};

LossCoeffs loss_coeffs(double p0, double p1, int label) {
    const double w = p0 + p1;
    const double ph0 = p0 / w;
    const double ph1 = p1 / w;
    const bool live0 = ph0 > kProbClamp && ph0 < 1.0 - kProbClamp;
    const bool live1 = ph1 > kProbClamp && ph1 < 1.0 - kProbClamp;
    const double dldh0 = live0 ? -(1.0 - label) / ph0 : 0.0;
    const double dldh1 = live1 ? -static_cast<double>(label) / ph1 : 0.0;
    return {(p1 / (w * w)) * (dldh0 - dldh1),
            (p0 / (w * w)) * (dldh1 - dldh0)};
}

void accumulate(Gradient& grad, const ParamKey& key, int slot, double value) {
    grad.by_key.at(key)(slot) += value;
}

} // namespace

void Gradient::add_scaled(const Gradient& other, double scale) {
    for (const auto& [key, v] : other.by_key) {
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            by_key.emplace(key, scale * v);
        } else {
            it->second += scale * v;
        }
    }
    loss += scale * other.loss;
}

double Gradient::max_abs() const {
    double m = 0.0;
    for (const auto& [key, v] : by_key) {
        if (v.size() > 0) {
            m = std::max(m, v.cwiseAbs().maxCoeff());
        }
    }
    return m;
}

Gradient zeros_like(const ParamStore& store) {
    Gradient g;
    for (const auto& [key, v] : store.entries) {
        g.by_key.emplace(key, Eigen::VectorXd::Zero(v.size()));
    }
    return g;
}

double bce_loss(const Outcome& outcome, int label) {
    const double c0 = clamp_prob(outcome.p0);
    const double c1 = clamp_prob(outcome.p1);
    return -(label * std::log(c1) + (1 - label) * std::log(c0));
}

double loss_of(const CircuitPlan& plan, const ParamStore& store, int label,
               Mode mode) {
    return bce_loss(eval(plan, store, mode), label);
}

Gradient grad_adjoint(const CircuitPlan& plan, const ParamStore& store,
                      int label, Mode mode) {
    EvalTrace trace;
    const Outcome out = eval(plan, store, mode, {}, &trace);
    Gradient grad = zeros_like(store);
    grad.loss = bce_loss(out, label);
    const auto [g0, g1] = loss_coeffs(trace.p0_raw, trace.p1_raw, label);

    if (mode == Mode::Postselect) {
        // cotangent lambda_i = dL/dpsi_i^*
        VectorXc lambda(trace.psi_final.size());
        const int n_final =
            static_cast<int>(std::round(std::log2(trace.psi_final.size())));
        for (Eigen::Index i = 0; i < lambda.size(); ++i) {
            const double g =
                bit_of(static_cast<std::size_t>(i), plan.measure_qubit,
                       n_final) == 0
                    ? g0
                    : g1;
            lambda(i) = g * trace.psi_final(i);
        }
        for (auto it = trace.ops.rbegin(); it != trace.ops.rend(); ++it) {
            const TraceOp& op = *it;
            const int n =
                static_cast<int>(std::round(std::log2(lambda.size())));
            switch (op.kind) {
            case TraceOp::Kind::Gate: {
                if (op.slot >= 0) {
                    VectorXc phi = op.psi_before;
                    if (op.t1 >= 0) {
                        apply_2q(phi, n, gate_derivative_2q(op.gate, op.angle),
                                 op.t0, op.t1);
                    } else {
                        apply_1q(phi, n, gate_derivative_1q(op.gate, op.angle),
                                 op.t0);
                    }
                    accumulate(grad, op.key, op.slot,
                               2.0 * lambda.dot(phi).real());
                }
                if (op.t1 >= 0) {
                    apply_2q(lambda, n,
                             gate_matrix_2q(op.gate, op.angle)
                                 .adjoint()
                                 .eval(),
                             op.t0, op.t1);
                } else {
                    apply_1q(lambda, n,
                             gate_matrix_1q(op.gate, op.angle)
                                 .adjoint()
                                 .eval(),
                             op.t0);
                }
                break;
            }
            case TraceOp::Kind::Introduce:
                lambda = introduce_adjoint(lambda, op.count);
                break;
            case TraceOp::Kind::Reduce:
                lambda = project_zero_adjoint(lambda, op.n_before, op.qubits);
                break;
            }
        }
        return grad;
    }

    // discard mode: cotangent lambda = dL/drho^* = diag(g_b)/2 at the end
    MatrixXc lambda = MatrixXc::Zero(trace.rho_final.rows(),
                                     trace.rho_final.cols());
    const int n_final =
        static_cast<int>(std::round(std::log2(trace.rho_final.rows())));
    for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
        const double g = bit_of(static_cast<std::size_t>(i),
                                plan.measure_qubit, n_final) == 0
                             ? g0
                             : g1;
        lambda(i, i) = 0.5 * g;
    }
    for (auto it = trace.ops.rbegin(); it != trace.ops.rend(); ++it) {
        const TraceOp& op = *it;
        const int n = static_cast<int>(std::round(std::log2(lambda.rows())));
        switch (op.kind) {
        case TraceOp::Kind::Gate: {
            if (op.slot >= 0) {
                // d(U rho U^dag)/dtheta = D rho U^dag + U rho D^dag
                auto apply_u = [&](auto&& col) {
                    if (op.t1 >= 0) {
                        apply_2q(col, n, gate_matrix_2q(op.gate, op.angle),
                                 op.t0, op.t1);
                    } else {
                        apply_1q(col, n, gate_matrix_1q(op.gate, op.angle),
                                 op.t0);
                    }
                };
                auto apply_d = [&](auto&& col) {
                    if (op.t1 >= 0) {
                        apply_2q(col, n, gate_derivative_2q(op.gate, op.angle),
                                 op.t0, op.t1);
                    } else {
                        apply_1q(col, n, gate_derivative_1q(op.gate, op.angle),
                                 op.t0);
                    }
                };
                MatrixXc term1 = op.rho_before;
                sandwich(term1, apply_d, apply_u);
                MatrixXc term2 = op.rho_before;
                sandwich(term2, apply_u, apply_d);
                term1 += term2;
                const Complex tr =
                    (lambda.conjugate().cwiseProduct(term1)).sum();
                accumulate(grad, op.key, op.slot, 2.0 * tr.real());
            }
            // lambda <- U^dag lambda U
            auto apply_udag = [&](auto&& col) {
                if (op.t1 >= 0) {
                    apply_2q(col, n,
                             gate_matrix_2q(op.gate, op.angle)
                                 .adjoint()
                                 .eval(),
                             op.t0, op.t1);
                } else {
                    apply_1q(col, n,
                             gate_matrix_1q(op.gate, op.angle)
                                 .adjoint()
                                 .eval(),
                             op.t0);
                }
            };
            sandwich(lambda, apply_udag, apply_udag);
            break;
        }
        case TraceOp::Kind::Introduce:
            lambda = introduce_adjoint(lambda, op.count);
            break;
        case TraceOp::Kind::Reduce:
            lambda = partial_trace_adjoint(lambda, op.n_before, op.qubits);
            break;
        }
    }
    return grad;
}

Gradient finite_diff(const std::function<double(const ParamStore&)>& fn,
                     const ParamStore& store, double h) {
    Gradient grad = zeros_like(store);
    grad.loss = fn(store);
    ParamStore probe = store;
    for (auto& [key, v] : probe.entries) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double saved = v(i);
            v(i) = saved + h;
            const double up = fn(probe);
            v(i) = saved - h;
            const double down = fn(probe);
            v(i) = saved;
            grad.by_key.at(key)(i) = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

Gradient grad_finite_diff(const CircuitPlan& plan, const ParamStore& store,
                          int label, Mode mode, double h) {
    return finite_diff(
        [&](const ParamStore& s) { return loss_of(plan, s, label, mode); },
        store, h);
}

Gradient grad_param_shift(const CircuitPlan& plan, const ParamStore& store,
                          int label, Mode mode) {
    EvalTrace trace;
    const Outcome base = eval(plan, store, mode, {}, &trace);
    Gradient grad = zeros_like(store);
    grad.loss = bce_loss(base, label);
    const auto [g0, g1] = loss_coeffs(trace.p0_raw, trace.p1_raw, label);

    // parameterized occurrences in execution order
    struct Occurrence {
        GateKind kind;
        ParamKey key;
        int slot;
    };
    std::vector<Occurrence> occ;
    for (const Stage& stage : plan.stages) {
        if (const auto* ap = std::get_if<ApplyStage>(&stage)) {
            for (const Gate& g : ap->seq.gates) {
                if (g.slot >= 0) {
                    occ.push_back({g.kind, ap->key, g.slot});
                }
            }
        }
    }

    auto raw_probs = [&](int ordinal, double delta) {
        const GateShift shift{ordinal, delta};
        const Outcome o = eval(plan, store, mode, {&shift, 1});
        return std::pair<double, double>{o.p0 * o.raw_weight,
                                         o.p1 * o.raw_weight};
    };

    for (int o = 0; o < static_cast<int>(occ.size()); ++o) {
        double dp0 = 0.0;
        double dp1 = 0.0;
        switch (occ[o].kind) {
        case GateKind::Rx:
        case GateKind::Ry:
        case GateKind::Rz: {
            const auto [p0p, p1p] = raw_probs(o, M_PI / 2.0);
            const auto [p0m, p1m] = raw_probs(o, -M_PI / 2.0);
            dp0 = 0.5 * (p0p - p0m);
            dp1 = 0.5 * (p1p - p1m);
            break;
        }
        case GateKind::CRx:
        case GateKind::CRz: {
            // four-term rule for generators with eigenvalue gaps {1/2, 1}
            const double cplus = (std::sqrt(2.0) + 1.0) / (4.0 * std::sqrt(2.0));
            const double cminus =
                (std::sqrt(2.0) - 1.0) / (4.0 * std::sqrt(2.0));
            const auto [a0, a1] = raw_probs(o, M_PI / 2.0);
            const auto [b0, b1] = raw_probs(o, -M_PI / 2.0);
            const auto [c0, c1] = raw_probs(o, 3.0 * M_PI / 2.0);
            const auto [d0, d1] = raw_probs(o, -3.0 * M_PI / 2.0);
            dp0 = cplus * (a0 - b0) - cminus * (c0 - d0);
            dp1 = cplus * (a1 - b1) - cminus * (c1 - d1);
            break;
        }
        default:
            throw Error(Errc::UnsupportedGateForShift,
                        std::string("grad_param_shift: gate kind ") +
                            to_string(occ[o].kind) +
                            " has no shift rule");
        }
        accumulate(grad, occ[o].key, occ[o].slot, g0 * dp0 + g1 * dp1);
    }
    return grad;
}

Gradient spsa(const std::function<double(const ParamStore&)>& fn,
              const ParamStore& store, double c, std::uint64_t seed) {
    Rng rng(seed);
    Gradient delta = zeros_like(store);
    for (auto& [key, v] : delta.by_key) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v(i) = rng.sign();
        }
    }
    ParamStore up = store;
    ParamStore down = store;
    for (auto& [key, v] : up.entries) {
        v += c * delta.by_key.at(key);
    }
    for (auto& [key, v] : down.entries) {
        v -= c * delta.by_key.at(key);
    }
    const double slope = (fn(up) - fn(down)) / (2.0 * c);
    Gradient grad = zeros_like(store);
    grad.loss = fn(store);
    for (auto& [key, v] : grad.by_key) {
        // Rademacher entries are their own reciprocals
        v = slope * delta.by_key.at(key);
    }
    return grad;
}

Gradient grad_spsa(const CircuitPlan& plan, const ParamStore& store, int label,
                   Mode mode, double c, std::uint64_t seed) {
    if (c <= 0.0) {
        throw Error(Errc::InvalidConfig, "grad_spsa: perturbation must be > 0");
    }
    return spsa(
        [&](const ParamStore& s) { return loss_of(plan, s, label, mode); },
        store, c, seed);
}

} // namespace qtn
