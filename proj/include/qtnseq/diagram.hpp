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

#include <span>
#include <string>
#include <vector>

namespace qtn {

enum class Topology { Path, Convolutional };

/// How merge boxes eliminate their redundant wires: postselect conditions
/// on the all-zeros outcome (subnormalized pure state), discard partial-
/// traces them (density matrix).
enum class Mode { Postselect, Discard };

const char* to_string(Mode m);

/// Wire payloads: Internal carries q qubits, Sentence carries q' qubits.
enum class WireKind { Internal, Sentence };

enum class BoxRole { Word, Filter, Merge, Classifier };

/// A process box in a scheme diagram.
///
/// Arities are fixed by role: Word 0->1, Filter 2->2, Merge 2->1,
/// Classifier 1->1 (Sentence output). `layer`/`index` locate the box in the
/// topology: for path diagrams words sit at layer 0 and merge i at (i, 0);
/// for convolutional diagrams layer counts tree levels from the leaves.
struct Box {
    int id = 0;
    BoxRole role = BoxRole::Word;
    int token = -1; // token id for Word boxes, -1 otherwise
    int layer = 0;
    int index = 0;
    int in_arity = 0;
    int out_arity = 0;
};

/// Sink box id marking the unique diagram output.
inline constexpr int kDiagramOutput = -1;

/// Directed connection from (src_box, src_port) to (dst_box, dst_port).
/// dst_box == kDiagramOutput denotes the diagram's sentence-type output.
struct Wire {
    int src_box = 0;
    int src_port = 0;
    int dst_box = 0;
    int dst_port = 0;
    WireKind kind = WireKind::Internal;
};

struct SchemeDiagram {
    Topology topology = Topology::Path;
    int sequence_length = 0;
    int padded_length = 0; // leaf count after PAD padding (== N for path)
    std::vector<Box> boxes;
    std::vector<Wire> wires;

    const Box* classifier() const;
    int count_role(BoxRole role) const;
};

enum class ViolationKind {
    ArityViolation,
    TypeViolation,
    Cycle,
    MultipleOutputs,
    MissingClassifier,
    PortConflict,
};

struct Violation {
    ViolationKind kind;
    int box_id; // -1 when no single box is at fault
    std::string detail;
};

const char* to_string(BoxRole role);
const char* to_string(ViolationKind kind);

/// Builds the path diagram: N word boxes folded left-to-right through N-1
/// merge boxes, ending in one classifier.
SchemeDiagram build_ptn(std::span<const int> tokens);

/// Builds the convolutional diagram: tokens are right-padded with
/// `pad_token` to the next power of two and consumed by a balanced binary
/// merge tree. At each level, filter boxes sit on the adjacent wire pairs
/// that straddle merge boundaries.
SchemeDiagram build_ctn(std::span<const int> tokens, int pad_token);

/// Checks every structural invariant; returns all violations found
/// (empty means valid). Violations are data, not errors.
std::vector<Violation> validate(const SchemeDiagram& diagram);

/// Line-oriented text listing, one box per line (id, role, position, token,
/// input wire endpoints), used by the `export` CLI command.
std::string export_diagram(const SchemeDiagram& diagram);

/// Smallest power of two >= n (n >= 1).
int next_pow2(int n);

} // namespace qtn
