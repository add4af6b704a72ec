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

#include "qtnseq/diagram.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "qtnseq/error.hpp"

namespace qtn {

namespace {

struct Arity {
    int in;
    int out;
};

Arity role_arity(BoxRole role) {
    switch (role) {
    case BoxRole::Word:
        return {0, 1};
    case BoxRole::Filter:
        return {2, 2};
    case BoxRole::Merge:
        return {2, 1};
    case BoxRole::Classifier:
        return {1, 1};
    }
    return {0, 0};
}

Box& add_box(SchemeDiagram& d, BoxRole role, int token, int layer, int index) {
    const Arity a = role_arity(role);
    d.boxes.push_back(Box{static_cast<int>(d.boxes.size()), role, token,
                          layer, index, a.in, a.out});
    return d.boxes.back();
}

void connect(SchemeDiagram& d, int src_box, int src_port, int dst_box,
             int dst_port, WireKind kind = WireKind::Internal) {
    d.wires.push_back(Wire{src_box, src_port, dst_box, dst_port, kind});
}

} // namespace

const char* to_string(Mode m) {
    return m == Mode::Postselect ? "postselect" : "discard";
}

const char* to_string(BoxRole role) {
    switch (role) {
    case BoxRole::Word:
        return "word";
    case BoxRole::Filter:
        return "filter";
    case BoxRole::Merge:
        return "merge";
    case BoxRole::Classifier:
        return "classifier";
    }
    return "?";
}

const char* to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::ArityViolation:
        return "ArityViolation";
    case ViolationKind::TypeViolation:
        return "TypeViolation";
    case ViolationKind::Cycle:
        return "Cycle";
    case ViolationKind::MultipleOutputs:
        return "MultipleOutputs";
    case ViolationKind::MissingClassifier:
        return "MissingClassifier";
    case ViolationKind::PortConflict:
        return "PortConflict";
    }
    return "?";
}

const Box* SchemeDiagram::classifier() const {
    for (const Box& b : boxes) {
        if (b.role == BoxRole::Classifier) {
            return &b;
        }
    }
    return nullptr;
}

int SchemeDiagram::count_role(BoxRole role) const {
    return static_cast<int>(std::count_if(
        boxes.begin(), boxes.end(),
        [role](const Box& b) { return b.role == role; }));
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

SchemeDiagram build_ptn(std::span<const int> tokens) {
    if (tokens.empty()) {
        throw Error(Errc::EmptySequence, "build_ptn: empty token sequence");
    }
    const int n = static_cast<int>(tokens.size());

    SchemeDiagram d;
    d.topology = Topology::Path;
    d.sequence_length = n;
    d.padded_length = n;

    for (int j = 0; j < n; ++j) {
        add_box(d, BoxRole::Word, tokens[j], 0, j);
    }

    // Fold strictly left-to-right: merge i combines the running carry with
    // word i+1 and keeps the carry on its first output wire.
    int carry_box = 0;
    int carry_port = 0;
    for (int i = 1; i < n; ++i) {
        const Box& m = add_box(d, BoxRole::Merge, -1, i, 0);
        connect(d, carry_box, carry_port, m.id, 0);
        connect(d, i, 0, m.id, 1); // word box i
        carry_box = m.id;
        carry_port = 0;
    }

    const Box& cls = add_box(d, BoxRole::Classifier, -1, n, 0);
    connect(d, carry_box, carry_port, cls.id, 0);
    connect(d, cls.id, 0, kDiagramOutput, 0, WireKind::Sentence);
    return d;
}

SchemeDiagram build_ctn(std::span<const int> tokens, int pad_token) {
    if (tokens.empty()) {
        throw Error(Errc::EmptySequence, "build_ctn: empty token sequence");
    }
    const int n = static_cast<int>(tokens.size());
    const int padded = next_pow2(n);

    SchemeDiagram d;
    d.topology = Topology::Convolutional;
    d.sequence_length = n;
    d.padded_length = padded;

    struct Source {
        int box;
        int port;
    };
    std::vector<Source> live;
    for (int j = 0; j < padded; ++j) {
        const Box& w =
            add_box(d, BoxRole::Word, j < n ? tokens[j] : pad_token, 0, j);
        live.push_back({w.id, 0});
    }

    int layer = 0;
    while (live.size() > 1) {
        ++layer;
        const int w = static_cast<int>(live.size());
        // Filters on the 1-indexed pairs (2,3),(4,5),...,(w-2,w-1): the
        // adjacent wires that do not feed the same merge box.
        for (int f = 0; 2 * f + 2 <= w - 1; ++f) {
            const int a = 2 * f + 1;
            const int b = 2 * f + 2;
            const Box& fb = add_box(d, BoxRole::Filter, -1, layer, f);
            connect(d, live[a].box, live[a].port, fb.id, 0);
            connect(d, live[b].box, live[b].port, fb.id, 1);
            live[a] = {fb.id, 0};
            live[b] = {fb.id, 1};
        }
        std::vector<Source> next;
        for (int m = 0; m < w / 2; ++m) {
            const Box& mb = add_box(d, BoxRole::Merge, -1, layer, m);
            connect(d, live[2 * m].box, live[2 * m].port, mb.id, 0);
            connect(d, live[2 * m + 1].box, live[2 * m + 1].port, mb.id, 1);
            next.push_back({mb.id, 0});
        }
        live = std::move(next);
    }

    const Box& cls = add_box(d, BoxRole::Classifier, -1, layer + 1, 0);
    connect(d, live[0].box, live[0].port, cls.id, 0);
    connect(d, cls.id, 0, kDiagramOutput, 0, WireKind::Sentence);
    return d;
}

std::vector<Violation> validate(const SchemeDiagram& d) {
    std::vector<Violation> out;
    const int nboxes = static_cast<int>(d.boxes.size());

    auto box_ok = [&](int id) { return id >= 0 && id < nboxes; };

    // Per-port connection counts.
    std::map<std::pair<int, int>, int> in_count;
    std::map<std::pair<int, int>, int> out_count;
    int output_wires = 0;
    for (const Wire& w : d.wires) {
        if (!box_ok(w.src_box)) {
            out.push_back({ViolationKind::PortConflict, w.src_box,
                           "wire source references unknown box"});
            continue;
        }
        ++out_count[{w.src_box, w.src_port}];
        if (w.dst_box == kDiagramOutput) {
            ++output_wires;
            if (d.boxes[w.src_box].role != BoxRole::Classifier) {
                out.push_back({ViolationKind::TypeViolation, w.src_box,
                               "diagram output fed by non-classifier box"});
            }
            if (w.kind != WireKind::Sentence) {
                out.push_back({ViolationKind::TypeViolation, w.src_box,
                               "diagram output wire is not sentence-typed"});
            }
            continue;
        }
        if (!box_ok(w.dst_box)) {
            out.push_back({ViolationKind::PortConflict, w.dst_box,
                           "wire sink references unknown box"});
            continue;
        }
        ++in_count[{w.dst_box, w.dst_port}];
        if (w.kind == WireKind::Sentence) {
            out.push_back({ViolationKind::TypeViolation, w.dst_box,
                           "sentence-typed wire feeding a box input"});
        }
    }

    int classifiers = 0;
    for (const Box& b : d.boxes) {
        const Arity want = role_arity(b.role);
        if (b.in_arity != want.in || b.out_arity != want.out) {
            out.push_back({ViolationKind::ArityViolation, b.id,
                           std::string(to_string(b.role)) +
                               " box declares wrong arity"});
        }
        int in_wires = 0;
        int out_wires = 0;
        for (const Wire& w : d.wires) {
            if (w.dst_box == b.id) {
                ++in_wires;
            }
            if (w.src_box == b.id) {
                ++out_wires;
            }
        }
        if (in_wires != want.in) {
            out.push_back({ViolationKind::ArityViolation, b.id,
                           std::string(to_string(b.role)) + " box has " +
                               std::to_string(in_wires) + " inputs, expects " +
                               std::to_string(want.in)});
        }
        if (out_wires != want.out) {
            out.push_back({ViolationKind::ArityViolation, b.id,
                           std::string(to_string(b.role)) + " box has " +
                               std::to_string(out_wires) +
                               " outputs, expects " +
                               std::to_string(want.out)});
        }
        if (b.role == BoxRole::Classifier) {
            ++classifiers;
        }
    }
    if (classifiers == 0) {
        out.push_back(
            {ViolationKind::MissingClassifier, -1, "no classifier box"});
    } else if (classifiers > 1 || output_wires != 1) {
        out.push_back({ViolationKind::MultipleOutputs, -1,
                       std::to_string(classifiers) + " classifiers, " +
                           std::to_string(output_wires) + " output wires"});
    }

    // Each port carries exactly one wire.
    for (const auto& [port, count] : in_count) {
        if (count > 1) {
            out.push_back({ViolationKind::PortConflict, port.first,
                           "input port " + std::to_string(port.second) +
                               " has " + std::to_string(count) + " wires"});
        }
    }
    for (const auto& [port, count] : out_count) {
        if (count > 1) {
            out.push_back({ViolationKind::PortConflict, port.first,
                           "output port " + std::to_string(port.second) +
                               " has " + std::to_string(count) + " wires"});
        }
    }

    // Acyclicity (Kahn).
    std::vector<int> indeg(nboxes, 0);
    for (const Wire& w : d.wires) {
        if (w.dst_box != kDiagramOutput && box_ok(w.dst_box) &&
            box_ok(w.src_box)) {
            ++indeg[w.dst_box];
        }
    }
    std::deque<int> ready;
    for (int i = 0; i < nboxes; ++i) {
        if (indeg[i] == 0) {
            ready.push_back(i);
        }
    }
    int visited = 0;
    while (!ready.empty()) {
        const int b = ready.front();
        ready.pop_front();
        ++visited;
        for (const Wire& w : d.wires) {
            if (w.src_box == b && w.dst_box != kDiagramOutput &&
                box_ok(w.dst_box)) {
                if (--indeg[w.dst_box] == 0) {
                    ready.push_back(w.dst_box);
                }
            }
        }
    }
    if (visited != nboxes) {
        out.push_back({ViolationKind::Cycle, -1,
                       "diagram contains a cycle (" +
                           std::to_string(nboxes - visited) +
                           " boxes unreachable by topological order)"});
    }
    return out;
}

std::string export_diagram(const SchemeDiagram& d) {
    std::ostringstream os;
    os << "# topology="
       << (d.topology == Topology::Path ? "ptn" : "ctn")
       << " length=" << d.sequence_length << " padded=" << d.padded_length
       << "\n";
    for (const Box& b : d.boxes) {
        os << "box " << b.id << " " << to_string(b.role) << " " << b.layer
           << " " << b.index;
        if (b.role == BoxRole::Word) {
            os << " token=" << b.token;
        }
        // input endpoints in port order
        os << " in=";
        bool first = true;
        for (int port = 0; port < b.in_arity; ++port) {
            for (const Wire& w : d.wires) {
                if (w.dst_box == b.id && w.dst_port == port) {
                    if (!first) {
                        os << ",";
                    }
                    os << w.src_box << ":" << w.src_port;
                    first = false;
                }
            }
        }
        if (first) {
            os << "-";
        }
        for (const Wire& w : d.wires) {
            if (w.src_box == b.id && w.dst_box == kDiagramOutput) {
                os << " out=sentence";
            }
        }
        os << "\n";
    }
    return os.str();
}

} // namespace qtn
