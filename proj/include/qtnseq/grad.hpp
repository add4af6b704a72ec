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

#include <cstdint>
#include <functional>
#include <map>

#include "qtnseq/engine.hpp"

namespace qtn {

/// Per-key gradient vectors, shape-congruent with a ParamStore.
struct Gradient {
    std::map<ParamKey, Eigen::VectorXd> by_key;
    double loss = 0.0;

    void add_scaled(const Gradient& other, double scale);
    double max_abs() const;
};

Gradient zeros_like(const ParamStore& store);

/// Binary cross-entropy of the normalized outcome against label y in {0,1}.
/// Probabilities are clamped to [1e-7, 1-1e-7] inside the logs.
double bce_loss(const Outcome& outcome, int label);

double loss_of(const CircuitPlan& plan, const ParamStore& store, int label,
               Mode mode);

/// Exact gradient by reverse-mode differentiation through the staged
/// contraction. Contributions of boxes sharing a key are summed.
Gradient grad_adjoint(const CircuitPlan& plan, const ParamStore& store,
                      int label, Mode mode);

/// Central finite differences on an arbitrary loss functional (oracle core).
Gradient finite_diff(const std::function<double(const ParamStore&)>& fn,
                     const ParamStore& store, double h);

Gradient grad_finite_diff(const CircuitPlan& plan, const ParamStore& store,
                          int label, Mode mode, double h = 1e-5);

/// Parameter-shift rule: two-term shifts for single-qubit rotations,
/// four-term shifts for controlled rotations, chained through the loss at
/// the unshifted outcome.
Gradient grad_param_shift(const CircuitPlan& plan, const ParamStore& store,
                          int label, Mode mode);

/// Simultaneous-perturbation estimate with Rademacher directions (core).
Gradient spsa(const std::function<double(const ParamStore&)>& fn,
              const ParamStore& store, double c, std::uint64_t seed);

Gradient grad_spsa(const CircuitPlan& plan, const ParamStore& store, int label,
                   Mode mode, double c, std::uint64_t seed);

} // namespace qtn
