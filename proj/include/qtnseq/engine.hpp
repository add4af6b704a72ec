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

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "qtnseq/ansatz.hpp"
#include "qtnseq/diagram.hpp"
#include "qtnseq/gates.hpp"

namespace qtn {

/// Extend the live register with n fresh |0> qubits on the right.
struct IntroduceStage {
    int n_qubits;
};

/// Apply a box circuit; `qubits` maps the circuit's local wires to live
/// qubit indices.
struct ApplyStage {
    GateSequence seq;
    ParamKey key;
    std::vector<int> qubits;
};

/// Eliminate the listed qubits: <0| projection under postselect semantics,
/// partial trace under discard. Indices compact downward afterwards.
struct ReduceStage {
    std::vector<int> qubits;
};

using Stage = std::variant<IntroduceStage, ApplyStage, ReduceStage>;

/// Staged, contraction-ordered program for one diagram. Path plans
/// interleave introduce/apply/reduce so at most 2q qubits are ever live;
/// convolutional plans hold the whole leaf layer and halve it per level.
struct CircuitPlan {
    std::vector<Stage> stages;
    int measure_qubit = 0;
    int final_qubits = 0;
    int high_water = 0;
    int reduce_events = 0;
};

struct Outcome {
    double p0 = 0.0;
    double p1 = 0.0;
    double raw_weight = 0.0; // pre-normalization p0 + p1
    int predicted() const { return p1 > p0 ? 1 : 0; }
};

CircuitPlan plan(const SchemeDiagram& diagram, const ModelConfig& config);

/// Angle override for one parameterized-gate occurrence, addressed by its
/// ordinal in execution order (parameter-shift support).
struct GateShift {
    int ordinal;
    double delta;
};

/// Reverse-mode tape recorded during evaluation.
struct TraceOp {
    enum class Kind { Gate, Introduce, Reduce };
    Kind kind = Kind::Gate;
    // gate
    GateKind gate = GateKind::H;
    double angle = 0.0;
    int t0 = -1;
    int t1 = -1;
    int slot = -1;
    ParamKey key;
    VectorXc psi_before; // stored for parameterized gates (postselect mode)
    MatrixXc rho_before; // stored for parameterized gates (discard mode)
    // structure
    int count = 0;           // introduce width
    std::vector<int> qubits; // reduce set
    int n_before = 0;        // live qubits before a reduce
};

struct EvalTrace {
    std::vector<TraceOp> ops;
    VectorXc psi_final;
    MatrixXc rho_final;
    double p0_raw = 0.0;
    double p1_raw = 0.0;
};

/// Called with the state after every stage (discard mode only).
using StageObserver = std::function<void(const MatrixXc& rho, int n_qubits)>;

Outcome eval(const CircuitPlan& plan, const ParamStore& store, Mode mode,
             std::span<const GateShift> shifts = {},
             EvalTrace* trace = nullptr,
             const StageObserver* observer = nullptr);

/// Pure-state staged evaluation; reduces project onto <0| without
/// renormalizing. Fails with DegeneratePostselection when the all-zeros
/// branch carries (near-)zero weight.
Outcome eval_postselect(const CircuitPlan& plan, const ParamStore& store);

/// Density-matrix staged evaluation; reduces partial-trace. p0 + p1 = 1 up
/// to numerical drift, which is guarded at 1e-8.
Outcome eval_discard(const CircuitPlan& plan, const ParamStore& store,
                     const StageObserver* observer = nullptr);

/// Test oracle: the whole circuit on every word qubit at once, with all
/// postselection projectors applied at the end. Returns the unnormalized
/// full state (amplitudes with nonzero eliminated bits are zero).
/// Total qubits <= 14 or OracleTooLarge.
VectorXc brute_force_state(const SchemeDiagram& diagram,
                           const ModelConfig& config, const ParamStore& store);

/// Test oracle: full density-matrix evolution, tracing eliminated wires in
/// diagram order. Returns the final reduced matrix over the classifier
/// wire. Total qubits <= 7 or OracleTooLarge.
MatrixXc brute_force_density(const SchemeDiagram& diagram,
                             const ModelConfig& config,
                             const ParamStore& store);

/// Whole-plan gate listing for the `export` CLI command.
std::string export_plan(const CircuitPlan& plan);

} // namespace qtn
