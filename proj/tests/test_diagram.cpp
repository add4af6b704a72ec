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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "qtnseq/diagram.hpp"
#include "qtnseq/error.hpp"
#include "qtnseq/rng.hpp"

using namespace qtn;

namespace {

std::vector<int> tokens_of_length(int n) {
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i) {
        t[i] = i % 4;
    }
    return t;
}

/// Independent census: walk the wire graph from scratch instead of trusting
/// the builder's counters.
struct WalkCensus {
    int words = 0;
    int filters = 0;
    int merges = 0;
    int classifiers = 0;
    int wires = 0;
    bool reaches_output = false;
};

WalkCensus graph_walk(const SchemeDiagram& d) {
    WalkCensus c;
    c.wires = static_cast<int>(d.wires.size());
    // breadth-first from word boxes along wires
    std::set<int> seen;
    std::vector<int> frontier;
    for (const Box& b : d.boxes) {
        if (b.role == BoxRole::Word) {
            frontier.push_back(b.id);
            seen.insert(b.id);
        }
    }
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int id : frontier) {
            for (const Wire& w : d.wires) {
                if (w.src_box != id) {
                    continue;
                }
                if (w.dst_box == kDiagramOutput) {
                    c.reaches_output = true;
                } else if (seen.insert(w.dst_box).second) {
                    next.push_back(w.dst_box);
                }
            }
        }
        frontier = std::move(next);
    }
    for (int id : seen) {
        switch (d.boxes[id].role) {
        case BoxRole::Word:
            ++c.words;
            break;
        case BoxRole::Filter:
            ++c.filters;
            break;
        case BoxRole::Merge:
            ++c.merges;
            break;
        case BoxRole::Classifier:
            ++c.classifiers;
            break;
        }
    }
    return c;
}

/// Expected CTN filter total at padded length 2^k: sum over levels of
/// (width/2 - 1).
int expected_ctn_filters(int padded) {
    int filters = 0;
    for (int w = padded; w > 1; w /= 2) {
        filters += w / 2 - 1;
    }
    return filters;
}

} // namespace

TEST_CASE("ptn over AGSQ: 4 words, 3 merges, 1 classifier") {
    const std::vector<int> agsq{0, 5, 15, 13}; // A G S Q amino ids
    const SchemeDiagram d = build_ptn(agsq);
    CHECK(d.topology == Topology::Path);
    CHECK(d.sequence_length == 4);
    CHECK(d.count_role(BoxRole::Word) == 4);
    CHECK(d.count_role(BoxRole::Merge) == 3);
    CHECK(d.count_role(BoxRole::Filter) == 0);
    CHECK(d.count_role(BoxRole::Classifier) == 1);
    CHECK(validate(d).empty());
    // word tokens preserved in order
    for (int i = 0; i < 4; ++i) {
        CHECK(d.boxes[i].token == agsq[i]);
    }
}

TEST_CASE("ptn degenerate chain N=1") {
    const SchemeDiagram d = build_ptn(std::vector<int>{2});
    CHECK(d.count_role(BoxRole::Word) == 1);
    CHECK(d.count_role(BoxRole::Merge) == 0);
    CHECK(d.count_role(BoxRole::Classifier) == 1);
    CHECK(validate(d).empty());
}

TEST_CASE("ptn N=200 census and wire count by independent graph walk") {
    const SchemeDiagram d = build_ptn(tokens_of_length(200));
    const WalkCensus c = graph_walk(d);
    CHECK(c.words == 200);
    CHECK(c.merges == 199);
    CHECK(c.classifiers == 1);
    CHECK(c.wires == 400);
    CHECK(c.reaches_output);
    CHECK(validate(d).empty());
}

TEST_CASE("ptn merge positions run 1..N-1") {
    const SchemeDiagram d = build_ptn(tokens_of_length(5));
    std::vector<int> layers;
    for (const Box& b : d.boxes) {
        if (b.role == BoxRole::Merge) {
            layers.push_back(b.layer);
        }
    }
    std::sort(layers.begin(), layers.end());
    CHECK(layers == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("ptn empty input") {
    CHECK_THROWS_WITH_AS(build_ptn(std::vector<int>{}),
                         doctest::Contains("empty"), Error);
    try {
        build_ptn(std::vector<int>{});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptySequence);
    }
}

TEST_CASE("ctn N=4: one filter, three merges") {
    const SchemeDiagram d = build_ctn(tokens_of_length(4), 20);
    CHECK(d.padded_length == 4);
    CHECK(d.count_role(BoxRole::Word) == 4);
    CHECK(d.count_role(BoxRole::Filter) == 1);
    CHECK(d.count_role(BoxRole::Merge) == 3);
    CHECK(d.count_role(BoxRole::Classifier) == 1);
    CHECK(validate(d).empty());
}

TEST_CASE("ctn N=8: filters 3+1+0, merges 4+2+1") {
    const SchemeDiagram d = build_ctn(tokens_of_length(8), 20);
    CHECK(d.count_role(BoxRole::Word) == 8);
    CHECK(d.count_role(BoxRole::Filter) == 4);
    CHECK(d.count_role(BoxRole::Merge) == 7);
    // per-level filter counts
    std::map<int, int> per_layer;
    for (const Box& b : d.boxes) {
        if (b.role == BoxRole::Filter) {
            ++per_layer[b.layer];
        }
    }
    CHECK(per_layer[1] == 3);
    CHECK(per_layer[2] == 1);
    CHECK(per_layer.count(3) == 0);
}

TEST_CASE("ctn N=5 pads to 8 with PAD word boxes") {
    const int pad = 20;
    const SchemeDiagram d = build_ctn(tokens_of_length(5), pad);
    CHECK(d.sequence_length == 5);
    CHECK(d.padded_length == 8);
    int pad_words = 0;
    for (const Box& b : d.boxes) {
        if (b.role == BoxRole::Word && b.token == pad) {
            ++pad_words;
        }
    }
    CHECK(pad_words == 3);
    // census identical to N=8 by independent walk
    const WalkCensus c = graph_walk(d);
    CHECK(c.words == 8);
    CHECK(c.filters == 4);
    CHECK(c.merges == 7);
    CHECK(c.classifiers == 1);
    CHECK(validate(d).empty());
}

TEST_CASE("census formulas hold for all N up to 64") {
    for (int n = 1; n <= 64; ++n) {
        const SchemeDiagram p = build_ptn(tokens_of_length(n));
        CHECK(p.count_role(BoxRole::Word) == n);
        CHECK(p.count_role(BoxRole::Merge) == n - 1);
        CHECK(validate(p).empty());

        const SchemeDiagram c = build_ctn(tokens_of_length(n), 20);
        const int padded = c.padded_length;
        CHECK(c.count_role(BoxRole::Word) == padded);
        CHECK(c.count_role(BoxRole::Merge) == padded - 1);
        CHECK(c.count_role(BoxRole::Filter) == expected_ctn_filters(padded));
        CHECK(validate(c).empty());
    }
}

TEST_CASE("builders are deterministic") {
    const auto t = tokens_of_length(17);
    CHECK(export_diagram(build_ptn(t)) == export_diagram(build_ptn(t)));
    CHECK(export_diagram(build_ctn(t, 20)) ==
          export_diagram(build_ctn(t, 20)));
}

TEST_CASE("validate flags a merge with three inputs") {
    SchemeDiagram d = build_ptn(tokens_of_length(3));
    // find a merge and wire an extra word output into it
    int merge_id = -1;
    for (const Box& b : d.boxes) {
        if (b.role == BoxRole::Merge) {
            merge_id = b.id;
            break;
        }
    }
    d.boxes.push_back(Box{static_cast<int>(d.boxes.size()), BoxRole::Word, 0,
                          0, 99, 0, 1});
    d.wires.push_back(
        Wire{d.boxes.back().id, 0, merge_id, 2, WireKind::Internal});
    const auto violations = validate(d);
    CHECK(!violations.empty());
    const bool flagged = std::any_of(
        violations.begin(), violations.end(), [&](const Violation& v) {
            return v.kind == ViolationKind::ArityViolation &&
                   v.box_id == merge_id;
        });
    CHECK(flagged);
}

TEST_CASE("validate flags two classifiers") {
    SchemeDiagram d = build_ptn(tokens_of_length(2));
    const int extra = static_cast<int>(d.boxes.size());
    d.boxes.push_back(Box{extra, BoxRole::Classifier, -1, 9, 0, 1, 1});
    d.boxes.push_back(
        Box{extra + 1, BoxRole::Word, 0, 0, 98, 0, 1});
    d.wires.push_back(Wire{extra + 1, 0, extra, 0, WireKind::Internal});
    d.wires.push_back(
        Wire{extra, 0, kDiagramOutput, 0, WireKind::Sentence});
    const auto violations = validate(d);
    const bool flagged = std::any_of(
        violations.begin(), violations.end(), [](const Violation& v) {
            return v.kind == ViolationKind::MultipleOutputs;
        });
    CHECK(flagged);
}

TEST_CASE("validate flags a cycle") {
    SchemeDiagram d;
    d.topology = Topology::Path;
    d.sequence_length = 1;
    d.padded_length = 1;
    d.boxes.push_back(Box{0, BoxRole::Filter, -1, 1, 0, 2, 2});
    d.boxes.push_back(Box{1, BoxRole::Filter, -1, 2, 0, 2, 2});
    d.wires.push_back(Wire{0, 0, 1, 0, WireKind::Internal});
    d.wires.push_back(Wire{0, 1, 1, 1, WireKind::Internal});
    d.wires.push_back(Wire{1, 0, 0, 0, WireKind::Internal});
    d.wires.push_back(Wire{1, 1, 0, 1, WireKind::Internal});
    const auto violations = validate(d);
    const bool cyclic = std::any_of(
        violations.begin(), violations.end(),
        [](const Violation& v) { return v.kind == ViolationKind::Cycle; });
    CHECK(cyclic);
}

TEST_CASE("export lists one line per box") {
    const SchemeDiagram d = build_ptn(tokens_of_length(4));
    const std::string text = export_diagram(d);
    std::istringstream is(text);
    std::string line;
    int box_lines = 0;
    while (std::getline(is, line)) {
        if (line.rfind("box ", 0) == 0) {
            ++box_lines;
        }
    }
    CHECK(box_lines == 8);
}
