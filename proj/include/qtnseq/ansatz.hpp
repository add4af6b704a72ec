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

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtnseq/diagram.hpp"
#include "qtnseq/gates.hpp"

namespace qtn {

enum class Family { Sim14, Sim15, IQP };
enum class Sharing { Uniform, Hierarchical };

const char* to_string(Family f);
const char* to_string(Sharing s);
const char* to_string(Topology t);

/// Parameters consumed by one layer on n qubits.
/// Sim14: 4n (3 for n==1). Sim15: 2n (2 for n==1). IQP: n-1 (1 for n==1).
int per_layer_param_count(Family f, int n_qubits);

/// Total over `depth` stacked layers.
int param_count(Family f, int n_qubits, int depth);

/// One ansatz layer with dense parameter slots 0..p-1. `params` is used
/// only to check the expected length (ParamShapeMismatch otherwise); the
/// returned sequence is symbolic.
GateSequence build_layer(Family f, int n_qubits,
                         std::span<const double> params);

/// `depth` stacked layers, slots running 0..param_count-1.
GateSequence build_circuit(Family f, int n_qubits, int depth);

/// Identity of a trainable parameter vector. Word boxes key by token id;
/// merge/filter boxes key by position or tree layer under hierarchical
/// sharing and by the shared sentinel under uniform sharing.
struct ParamKey {
    enum class Kind { Word, Merge, Filter, Classifier };
    static constexpr int kShared = -1;

    Kind kind = Kind::Word;
    int index = 0;

    auto operator<=>(const ParamKey&) const = default;

    std::string str() const;
    static ParamKey parse(const std::string& text);
};

struct ModelConfig {
    Topology topology = Topology::Path;
    Sharing sharing = Sharing::Hierarchical;
    Mode mode = Mode::Discard;
    Family family = Family::Sim14;
    int q = 1;       // qubits per internal wire
    int qprime = 1;  // qubits on the sentence wire (binary tasks measure 1)
    int depth = 1;   // ansatz layers per box
    int vocab_size = 0;
    int pad_token = -1;
    int max_len = 0; // longest sequence the parameter schema covers

    // All roles share (family, depth) unless overridden here.
    std::map<BoxRole, Family> family_overrides;
    std::map<BoxRole, int> depth_overrides;

    Family family_of(BoxRole role) const {
        auto it = family_overrides.find(role);
        return it == family_overrides.end() ? family : it->second;
    }
    int depth_of(BoxRole role) const {
        auto it = depth_overrides.find(role);
        return it == depth_overrides.end() ? depth : it->second;
    }
};

/// Trainable parameter vectors, keyed per the sharing policy.
struct ParamStore {
    Sharing sharing = Sharing::Hierarchical;
    std::map<ParamKey, Eigen::VectorXd> entries;

    bool operator==(const ParamStore&) const = default;
};

/// Qubit width of a box's circuit for internal wire width q.
int box_width(BoxRole role, int q);

/// Resolves the parameter key a box draws from under the config's sharing
/// policy and topology.
ParamKey key_for(const Box& box, const ModelConfig& config);

/// A box's circuit bound to its parameter key, plus the reduction/measure
/// metadata the engine needs.
struct BoundBox {
    GateSequence seq;
    ParamKey key;
    int width = 0;        // qubits the circuit acts on
    int reduce_width = 0; // trailing qubits eliminated afterwards (merge)
    bool measures = false;
};

/// Symbolic instantiation (no parameter values needed).
BoundBox instantiate_box(const Box& box, const ModelConfig& config);

/// Instantiation validated against a store: throws UnboundParameters when
/// the key is missing and ParamShapeMismatch when its vector length is off.
BoundBox instantiate_box(const Box& box, const ModelConfig& config,
                         const ParamStore& store);

/// The full key/length schema: every key an evaluation may touch.
struct StoreSchema {
    std::vector<std::pair<ParamKey, int>> keys; // sorted by key
};

/// Schema from config alone: word keys for the whole vocabulary plus
/// merge/filter/classifier keys covering sequences up to max_len.
StoreSchema schema_for(const ModelConfig& config);

/// Schema restricted to the boxes of one diagram.
StoreSchema schema_for(const SchemeDiagram& diagram,
                       const ModelConfig& config);

enum class InitScheme { UniformAngle, SmallNormal };

/// Seed-deterministic initialization; UniformAngle draws from (-pi, pi),
/// SmallNormal from N(0, 0.01^2).
ParamStore init_params(const StoreSchema& schema, Sharing sharing,
                       std::uint64_t seed,
                       InitScheme scheme = InitScheme::UniformAngle);

/// Dense unitary of a gate sequence (matrix products of embedded gates, in
/// application order). Test oracle; n_qubits <= 12 or OracleTooLarge.
MatrixXc unitary_of(const GateSequence& seq, std::span<const double> params);

/// Gate-per-line text listing (kind, qubits, key + slot).
std::string export_circuit(const GateSequence& seq, const ParamKey& key);

} // namespace qtn
