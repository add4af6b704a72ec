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

// Brute-force reference contractions. Both oracles work on the full
// word-qubit register and resolve each box to a dense unitary via
// unitary_of, walking the diagram's wires rather than a staged plan, so
// they share no evaluation path with the engine.

#include <algorithm>
#include <map>
#include <optional>

#include "qtnseq/engine.hpp"
#include "qtnseq/error.hpp"
#include "qtnseq/linalg.hpp"

namespace qtn {

namespace {

struct WireSlots {
    std::vector<int> slots; // original leaf-register qubit ids
};

/// Walks boxes in dependency order following the diagram's wires, handing
/// each non-word box its input qubit slots. Word box j owns slots
/// [j*q, (j+1)*q) of the leaf register.
class DiagramWalk {
  public:
    DiagramWalk(const SchemeDiagram& d, int q) : d_(d) {
        for (const Box& b : d.boxes) {
            if (b.role == BoxRole::Word) {
                WireSlots w;
                for (int k = 0; k < q; ++k) {
                    w.slots.push_back(b.index * q + k);
                }
                outputs_[{b.id, 0}] = std::move(w);
            }
        }
    }

    /// Visits every filter/merge/classifier box exactly once; `visit`
    /// receives the box and its concatenated input slots and the walk
    /// records output wiring (merge keeps its first input wire).
    template <class Visit> void run(Visit&& visit) {
        std::vector<bool> done(d_.boxes.size(), false);
        for (const Box& b : d_.boxes) {
            done[b.id] = b.role == BoxRole::Word;
        }
        bool progressed = true;
        while (progressed) {
            progressed = false;
            for (const Box& b : d_.boxes) {
                if (done[b.id]) {
                    continue;
                }
                auto ins = inputs_of(b);
                if (!ins) {
                    continue;
                }
                std::vector<int> qubits;
                for (const WireSlots& w : *ins) {
                    qubits.insert(qubits.end(), w.slots.begin(),
                                  w.slots.end());
                }
                visit(b, qubits, *ins);
                switch (b.role) {
                case BoxRole::Merge:
                    outputs_[{b.id, 0}] = (*ins)[0];
                    break;
                case BoxRole::Filter:
                    outputs_[{b.id, 0}] = (*ins)[0];
                    outputs_[{b.id, 1}] = (*ins)[1];
                    break;
                case BoxRole::Classifier:
                    outputs_[{b.id, 0}] = (*ins)[0];
                    break;
                default:
                    break;
                }
                done[b.id] = true;
                progressed = true;
            }
        }
    }

  private:
    std::optional<std::vector<WireSlots>> inputs_of(const Box& b) const {
        std::vector<WireSlots> ins(b.in_arity);
        for (int port = 0; port < b.in_arity; ++port) {
            bool found = false;
            for (const Wire& w : d_.wires) {
                if (w.dst_box == b.id && w.dst_port == port) {
                    auto it = outputs_.find({w.src_box, w.src_port});
                    if (it == outputs_.end()) {
                        return std::nullopt;
                    }
                    ins[port] = it->second;
                    found = true;
                }
            }
            if (!found) {
                return std::nullopt;
            }
        }
        return ins;
    }

    const SchemeDiagram& d_;
    std::map<std::pair<int, int>, WireSlots> outputs_;
};

MatrixXc box_unitary(const Box& b, const ModelConfig& cfg,
                     const ParamStore& store) {
    const GateSequence seq = build_circuit(
        cfg.family_of(b.role), box_width(b.role, cfg.q), cfg.depth_of(b.role));
    auto it = store.entries.find(key_for(b, cfg));
    if (it == store.entries.end()) {
        throw Error(Errc::UnboundParameters,
                    "oracle: no parameters bound for key " +
                        key_for(b, cfg).str());
    }
    return unitary_of(seq, std::span<const double>(it->second.data(),
                                                   it->second.size()));
}

} // namespace

VectorXc brute_force_state(const SchemeDiagram& d, const ModelConfig& cfg,
                           const ParamStore& store) {
    const int total = d.padded_length * cfg.q;
    if (total > 14) {
        throw Error(Errc::OracleTooLarge,
                    "brute_force_state: " + std::to_string(total) +
                        " qubits exceeds the oracle bound of 14");
    }
    VectorXc psi = VectorXc::Zero(dim_of(total));
    psi(0) = 1.0;

    for (const Box& b : d.boxes) {
        if (b.role != BoxRole::Word) {
            continue;
        }
        std::vector<int> qubits;
        for (int k = 0; k < cfg.q; ++k) {
            qubits.push_back(b.index * cfg.q + k);
        }
        apply_dense(psi, total, box_unitary(b, cfg, store), qubits);
    }

    std::vector<int> bottom; // qubits eliminated by merges
    DiagramWalk walk(d, cfg.q);
    walk.run([&](const Box& b, const std::vector<int>& qubits,
                 const std::vector<WireSlots>& ins) {
        apply_dense(psi, total, box_unitary(b, cfg, store), qubits);
        if (b.role == BoxRole::Merge) {
            bottom.insert(bottom.end(), ins[1].slots.begin(),
                          ins[1].slots.end());
        }
    });

    // all projectors at the end: zero every amplitude with a nonzero
    // eliminated bit
    std::size_t mask = 0;
    for (int qb : bottom) {
        mask |= std::size_t{1} << (total - 1 - qb);
    }
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        if ((static_cast<std::size_t>(i) & mask) != 0) {
            psi(i) = 0.0;
        }
    }
    return psi;
}

MatrixXc brute_force_density(const SchemeDiagram& d, const ModelConfig& cfg,
                             const ParamStore& store) {
    const int total = d.padded_length * cfg.q;
    if (total > 7) {
        throw Error(Errc::OracleTooLarge,
                    "brute_force_density: " + std::to_string(total) +
                        " qubits exceeds the oracle bound of 7");
    }
    MatrixXc rho = MatrixXc::Zero(dim_of(total), dim_of(total));
    rho(0, 0) = 1.0;
    int live = total;

    // original leaf slot -> current qubit index (-1 once traced out)
    std::vector<int> position(total);
    for (int i = 0; i < total; ++i) {
        position[i] = i;
    }

    auto apply_box = [&](const Box& b, const std::vector<int>& slots) {
        std::vector<int> qubits;
        for (int s : slots) {
            qubits.push_back(position[s]);
        }
        const MatrixXc u = box_unitary(b, cfg, store);
        sandwich(
            rho, [&](auto&& col) { apply_dense(col, live, u, qubits); },
            [&](auto&& col) { apply_dense(col, live, u, qubits); });
    };

    for (const Box& b : d.boxes) {
        if (b.role != BoxRole::Word) {
            continue;
        }
        std::vector<int> slots;
        for (int k = 0; k < cfg.q; ++k) {
            slots.push_back(b.index * cfg.q + k);
        }
        apply_box(b, slots);
    }

    DiagramWalk walk(d, cfg.q);
    walk.run([&](const Box& b, const std::vector<int>& /*qubits*/,
                 const std::vector<WireSlots>& ins) {
        std::vector<int> slots;
        for (const WireSlots& w : ins) {
            slots.insert(slots.end(), w.slots.begin(), w.slots.end());
        }
        apply_box(b, slots);
        if (b.role == BoxRole::Merge) {
            std::vector<int> gone;
            for (int s : ins[1].slots) {
                gone.push_back(position[s]);
            }
            std::sort(gone.begin(), gone.end());
            rho = partial_trace(rho, live, gone);
            live -= static_cast<int>(gone.size());
            for (int& p : position) {
                if (p < 0) {
                    continue;
                }
                bool traced = false;
                int below = 0;
                for (int g : gone) {
                    if (g == p) {
                        traced = true;
                        break;
                    }
                    if (g < p) {
                        ++below;
                    }
                }
                p = traced ? -1 : p - below;
            }
        }
    });
    return rho;
}

} // namespace qtn
