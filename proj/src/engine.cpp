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

#include "qtnseq/engine.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "qtnseq/error.hpp"
#include "qtnseq/linalg.hpp"

namespace qtn {

namespace {

std::vector<int> iota_range(int first, int count) {
    std::vector<int> v(count);
    std::iota(v.begin(), v.end(), first);
    return v;
}

struct PlanBuilder {
    CircuitPlan plan;
    const ModelConfig& cfg;
    int live = 0;

    explicit PlanBuilder(const ModelConfig& c) : cfg(c) {}

    void introduce(int n) {
        plan.stages.push_back(IntroduceStage{n});
        live += n;
        plan.high_water = std::max(plan.high_water, live);
    }

    void apply(const Box& box, int first_qubit) {
        BoundBox bb = instantiate_box(box, cfg);
        plan.stages.push_back(
            ApplyStage{std::move(bb.seq), bb.key,
                       iota_range(first_qubit, bb.width)});
    }

    void reduce(int first_qubit, int count) {
        plan.stages.push_back(ReduceStage{iota_range(first_qubit, count)});
        live -= count;
        ++plan.reduce_events;
    }
};

/// Boxes of one role grouped by layer, ordered by index.
std::map<int, std::vector<const Box*>> by_layer(const SchemeDiagram& d,
                                                BoxRole role) {
    std::map<int, std::vector<const Box*>> out;
    for (const Box& b : d.boxes) {
        if (b.role == role) {
            out[b.layer].push_back(&b);
        }
    }
    for (auto& [layer, boxes] : out) {
        std::sort(boxes.begin(), boxes.end(),
                  [](const Box* a, const Box* b) { return a->index < b->index; });
    }
    return out;
}

} // namespace

CircuitPlan plan(const SchemeDiagram& d, const ModelConfig& cfg) {
    const auto violations = validate(d);
    if (!violations.empty()) {
        throw Error(Errc::PlanOnInvalidDiagram,
                    "plan: diagram has " + std::to_string(violations.size()) +
                        " violations; first: " + violations.front().detail);
    }

    PlanBuilder b(cfg);
    const int q = cfg.q;

    std::vector<const Box*> words;
    for (const Box& box : d.boxes) {
        if (box.role == BoxRole::Word) {
            words.push_back(&box);
        }
    }
    std::sort(words.begin(), words.end(),
              [](const Box* a, const Box* c) { return a->index < c->index; });
    const auto merges = by_layer(d, BoxRole::Merge);
    const auto filters = by_layer(d, BoxRole::Filter);
    const Box* cls = d.classifier();

    if (d.topology == Topology::Path) {
        b.introduce(q);
        b.apply(*words[0], 0);
        for (std::size_t i = 1; i < words.size(); ++i) {
            b.introduce(q);
            b.apply(*words[i], q);
            b.apply(*merges.at(static_cast<int>(i)).front(), 0);
            b.reduce(q, q);
        }
        b.apply(*cls, 0);
    } else {
        for (std::size_t j = 0; j < words.size(); ++j) {
            b.introduce(q);
        }
        for (std::size_t j = 0; j < words.size(); ++j) {
            b.apply(*words[j], static_cast<int>(j) * q);
        }
        int wires = d.padded_length;
        int layer = 0;
        while (wires > 1) {
            ++layer;
            if (auto it = filters.find(layer); it != filters.end()) {
                for (const Box* f : it->second) {
                    b.apply(*f, (2 * f->index + 1) * q);
                }
            }
            for (const Box* m : merges.at(layer)) {
                // merges to the left have already been reduced, so pair
                // (2m, 2m+1) now sits at wires (m, m+1)
                b.apply(*m, m->index * q);
                b.reduce((m->index + 1) * q, q);
            }
            wires /= 2;
        }
        b.apply(*cls, 0);
    }

    b.plan.measure_qubit = 0;
    b.plan.final_qubits = q;
    return b.plan;
}

namespace {

int qubits_of_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) {
        ++n;
    }
    return n;
}

const Eigen::VectorXd& bound_params(const ParamStore& store,
                                    const ApplyStage& st) {
    auto it = store.entries.find(st.key);
    if (it == store.entries.end()) {
        throw Error(Errc::UnboundParameters,
                    "eval: no parameters bound for key " + st.key.str());
    }
    if (static_cast<int>(it->second.size()) != st.seq.n_params) {
        throw Error(Errc::ParamShapeMismatch,
                    "eval: key " + st.key.str() + " has " +
                        std::to_string(it->second.size()) +
                        " values, circuit expects " +
                        std::to_string(st.seq.n_params));
    }
    return it->second;
}

} // namespace

Outcome eval(const CircuitPlan& p, const ParamStore& store, Mode mode,
             std::span<const GateShift> shifts, EvalTrace* trace,
             const StageObserver* observer) {
    const bool pure = mode == Mode::Postselect;
    VectorXc psi = VectorXc::Ones(1);
    MatrixXc rho = MatrixXc::Ones(1, 1);
    int n = 0;
    int ordinal = 0;

    auto shift_of = [&shifts](int o) {
        double delta = 0.0;
        for (const GateShift& s : shifts) {
            if (s.ordinal == o) {
                delta += s.delta;
            }
        }
        return delta;
    };

    for (const Stage& stage : p.stages) {
        if (const auto* in = std::get_if<IntroduceStage>(&stage)) {
            if (pure) {
                psi = introduce_qubits(psi, in->n_qubits);
            } else {
                rho = introduce_qubits(rho, in->n_qubits);
            }
            n += in->n_qubits;
            if (trace) {
                TraceOp op;
                op.kind = TraceOp::Kind::Introduce;
                op.count = in->n_qubits;
                trace->ops.push_back(std::move(op));
            }
        } else if (const auto* ap = std::get_if<ApplyStage>(&stage)) {
            const Eigen::VectorXd& params = bound_params(store, *ap);
            for (const Gate& g : ap->seq.gates) {
                double angle = 0.0;
                if (g.slot >= 0) {
                    angle = params(g.slot) + shift_of(ordinal);
                    ++ordinal;
                }
                const int t0 = ap->qubits[g.q0];
                const int t1 = g.q1 >= 0 ? ap->qubits[g.q1] : -1;
                if (trace) {
                    TraceOp op;
                    op.kind = TraceOp::Kind::Gate;
                    op.gate = g.kind;
                    op.angle = angle;
                    op.t0 = t0;
                    op.t1 = t1;
                    op.slot = g.slot;
                    op.key = ap->key;
                    if (g.slot >= 0) {
                        if (pure) {
                            op.psi_before = psi;
                        } else {
                            op.rho_before = rho;
                        }
                    }
                    trace->ops.push_back(std::move(op));
                }
                if (is_two_qubit(g.kind)) {
                    const Eigen::Matrix4cd u = gate_matrix_2q(g.kind, angle);
                    if (pure) {
                        apply_2q(psi, n, u, t0, t1);
                    } else {
                        sandwich(
                            rho,
                            [&](auto&& col) { apply_2q(col, n, u, t0, t1); },
                            [&](auto&& col) { apply_2q(col, n, u, t0, t1); });
                    }
                } else {
                    const Eigen::Matrix2cd u = gate_matrix_1q(g.kind, angle);
                    if (pure) {
                        apply_1q(psi, n, u, t0);
                    } else {
                        sandwich(
                            rho,
                            [&](auto&& col) { apply_1q(col, n, u, t0); },
                            [&](auto&& col) { apply_1q(col, n, u, t0); });
                    }
                }
            }
        } else {
            const auto& rd = std::get<ReduceStage>(stage);
            if (trace) {
                TraceOp op;
                op.kind = TraceOp::Kind::Reduce;
                op.qubits = rd.qubits;
                op.n_before = n;
                trace->ops.push_back(std::move(op));
            }
            if (pure) {
                psi = project_zero_remove(psi, n, rd.qubits);
            } else {
                rho = partial_trace(rho, n, rd.qubits);
                const double drift = std::abs(rho.trace().real() - 1.0);
                if (drift > 1e-8) {
                    throw Error(Errc::NumericalDrift,
                                "eval: density trace drifted by " +
                                    std::to_string(drift));
                }
            }
            n -= static_cast<int>(rd.qubits.size());
        }
        if (!pure && observer && *observer) {
            (*observer)(rho, n);
        }
    }

    double p0 = 0.0;
    double p1 = 0.0;
    if (pure) {
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
            const double w = std::norm(psi(i));
            (bit_of(static_cast<std::size_t>(i), p.measure_qubit, n) == 0
                 ? p0
                 : p1) += w;
        }
    } else {
        for (Eigen::Index i = 0; i < rho.rows(); ++i) {
            (bit_of(static_cast<std::size_t>(i), p.measure_qubit, n) == 0
                 ? p0
                 : p1) += rho(i, i).real();
        }
    }

    const double raw = p0 + p1;
    if (pure && raw < 1e-12) {
        throw Error(Errc::DegeneratePostselection,
                    "eval: postselection weight " + std::to_string(raw) +
                        " is (near-)zero");
    }
    if (!pure && std::abs(raw - 1.0) > 1e-8) {
        throw Error(Errc::NumericalDrift,
                    "eval: discard outcome mass " + std::to_string(raw));
    }

    if (trace) {
        trace->p0_raw = p0;
        trace->p1_raw = p1;
        if (pure) {
            trace->psi_final = std::move(psi);
        } else {
            trace->rho_final = std::move(rho);
        }
    }
    return Outcome{p0 / raw, p1 / raw, raw};
}

Outcome eval_postselect(const CircuitPlan& p, const ParamStore& store) {
    return eval(p, store, Mode::Postselect);
}

Outcome eval_discard(const CircuitPlan& p, const ParamStore& store,
                     const StageObserver* observer) {
    return eval(p, store, Mode::Discard, {}, nullptr, observer);
}

std::string export_plan(const CircuitPlan& p) {
    std::ostringstream os;
    for (const Stage& stage : p.stages) {
        if (const auto* in = std::get_if<IntroduceStage>(&stage)) {
            os << "# introduce " << in->n_qubits << "\n";
        } else if (const auto* ap = std::get_if<ApplyStage>(&stage)) {
            for (const Gate& g : ap->seq.gates) {
                os << to_string(g.kind) << " q" << ap->qubits[g.q0];
                if (g.q1 >= 0) {
                    os << ",q" << ap->qubits[g.q1];
                }
                if (g.slot >= 0) {
                    os << " " << ap->key.str() << "[" << g.slot << "]";
                }
                os << "\n";
            }
        } else {
            const auto& rd = std::get<ReduceStage>(stage);
            os << "# reduce";
            for (int q : rd.qubits) {
                os << " q" << q;
            }
            os << "\n";
        }
    }
    os << "# measure q" << p.measure_qubit << "\n";
    return os.str();
}

} // namespace qtn
