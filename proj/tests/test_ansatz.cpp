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

#include "qtnseq/ansatz.hpp"
#include "qtnseq/error.hpp"
#include "qtnseq/rng.hpp"

using namespace qtn;

namespace {

std::vector<double> random_angles(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) {
        x = rng.uniform(-M_PI, M_PI);
    }
    return v;
}

int measured_slot_count(const GateSequence& seq) {
    std::set<int> slots;
    for (const Gate& g : seq.gates) {
        if (g.slot >= 0) {
            slots.insert(g.slot);
        }
    }
    // slots must be dense 0..p-1
    int expect = 0;
    for (int s : slots) {
        REQUIRE(s == expect);
        ++expect;
    }
    return expect;
}

ModelConfig ptn_config(Sharing sharing, int max_len, int vocab = 22,
                       int q = 1, int depth = 1) {
    ModelConfig c;
    c.topology = Topology::Path;
    c.sharing = sharing;
    c.family = Family::Sim14;
    c.q = q;
    c.depth = depth;
    c.vocab_size = vocab;
    c.pad_token = vocab - 2;
    c.max_len = max_len;
    return c;
}

} // namespace

TEST_CASE("parameter counts match the per-family formula") {
    for (Family f : {Family::Sim14, Family::Sim15, Family::IQP}) {
        for (int n = 1; n <= 6; ++n) {
            for (int depth = 1; depth <= 3; ++depth) {
                const GateSequence seq = build_circuit(f, n, depth);
                CHECK(seq.n_params == param_count(f, n, depth));
                CHECK(measured_slot_count(seq) == param_count(f, n, depth));
            }
        }
    }
}

TEST_CASE("sim14 on two qubits: 8 gates consuming 8 parameters") {
    const auto params = random_angles(8, 1);
    const GateSequence seq = build_layer(Family::Sim14, 2, params);
    CHECK(seq.gates.size() == 8);
    CHECK(seq.n_params == 8);
}

TEST_CASE("sim14 single-qubit degenerate form: 6 parameters at depth 2") {
    CHECK(param_count(Family::Sim14, 1, 2) == 6);
    const GateSequence seq = build_circuit(Family::Sim14, 1, 2);
    CHECK(seq.n_params == 6);
    CHECK(seq.gates.size() == 6); // Ry Rz Ry per layer
}

TEST_CASE("iqp on three qubits is H,H,H,CRz(0,1),CRz(1,2)") {
    const auto params = random_angles(2, 2);
    const GateSequence seq = build_layer(Family::IQP, 3, params);
    REQUIRE(seq.gates.size() == 5);
    CHECK(seq.gates[0].kind == GateKind::H);
    CHECK(seq.gates[1].kind == GateKind::H);
    CHECK(seq.gates[2].kind == GateKind::H);
    CHECK(seq.gates[3].kind == GateKind::CRz);
    CHECK(seq.gates[3].q0 == 0);
    CHECK(seq.gates[3].q1 == 1);
    CHECK(seq.gates[4].kind == GateKind::CRz);
    CHECK(seq.gates[4].q0 == 1);
    CHECK(seq.gates[4].q1 == 2);
    CHECK(seq.n_params == 2);
}

TEST_CASE("build_layer rejects a wrong parameter vector length") {
    const auto params = random_angles(5, 3);
    CHECK_THROWS_AS(build_layer(Family::Sim14, 2, params), Error);
    try {
        build_layer(Family::Sim14, 2, params);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ParamShapeMismatch);
    }
}

TEST_CASE("unitarity across families, widths and depths") {
    std::uint64_t seed = 100;
    for (Family f : {Family::Sim14, Family::Sim15, Family::IQP}) {
        for (int n = 1; n <= 4; ++n) {
            for (int depth = 1; depth <= 2; ++depth) {
                const GateSequence seq = build_circuit(f, n, depth);
                const auto params = random_angles(seq.n_params, seed++);
                const MatrixXc u = unitary_of(seq, params);
                const MatrixXc res =
                    u.adjoint() * u - MatrixXc::Identity(u.rows(), u.cols());
                CHECK(res.cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }
}

TEST_CASE("zero angles give the identity for sim14 and sim15") {
    // IQP is excluded: its Hadamard layer is parameter-free and never
    // cancels.
    for (Family f : {Family::Sim14, Family::Sim15}) {
        for (int n = 1; n <= 3; ++n) {
            const GateSequence seq = build_circuit(f, n, 1);
            const std::vector<double> zeros(seq.n_params, 0.0);
            const MatrixXc u = unitary_of(seq, zeros);
            const MatrixXc res = u - MatrixXc::Identity(u.rows(), u.cols());
            CHECK(res.cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("Ry(pi) maps |0> to |1>") {
    GateSequence seq;
    seq.n_qubits = 1;
    seq.n_params = 1;
    seq.gates.push_back({GateKind::Ry, 0, -1, 0});
    const std::vector<double> angle{M_PI};
    const MatrixXc u = unitary_of(seq, angle);
    CHECK(std::abs(u(0, 0)) < 1e-15);
    CHECK(std::abs(u(1, 0) - 1.0) < 1e-15);
}

TEST_CASE("word box instantiation keys by token and has 3 parameters") {
    const ModelConfig cfg = ptn_config(Sharing::Hierarchical, 8);
    Box word{0, BoxRole::Word, /*token=*/0, 0, 0, 0, 1};
    const BoundBox bb = instantiate_box(word, cfg);
    CHECK(bb.key == ParamKey{ParamKey::Kind::Word, 0});
    CHECK(bb.seq.n_params == 3);
    CHECK(bb.width == 1);
    CHECK(bb.reduce_width == 0);
}

TEST_CASE("merge at position 5 keys hierarchically, 8 parameters at q=1") {
    const ModelConfig cfg = ptn_config(Sharing::Hierarchical, 8);
    Box merge{7, BoxRole::Merge, -1, /*layer=*/5, 0, 2, 1};
    const BoundBox bb = instantiate_box(merge, cfg);
    CHECK(bb.key == ParamKey{ParamKey::Kind::Merge, 5});
    CHECK(bb.seq.n_params == 8);
    CHECK(bb.width == 2);
    CHECK(bb.reduce_width == 1);

    // brute-force walk of the store: the key must resolve to exactly one
    // entry of the hierarchical schema
    const StoreSchema schema = schema_for(cfg);
    int hits = 0;
    for (const auto& [key, len] : schema.keys) {
        if (key == bb.key) {
            ++hits;
            CHECK(len == 8);
        }
    }
    CHECK(hits == 1);
}

TEST_CASE("uniform sharing collapses every merge onto one key") {
    const ModelConfig cfg = ptn_config(Sharing::Uniform, 8);
    std::set<ParamKey> merge_keys;
    const SchemeDiagram d = build_ptn(std::vector<int>{0, 1, 2, 3, 0, 1, 2});
    for (const Box& box : d.boxes) {
        if (box.role == BoxRole::Merge) {
            merge_keys.insert(key_for(box, cfg));
        }
    }
    CHECK(merge_keys.size() == 1);
    CHECK(*merge_keys.begin() ==
          ParamKey{ParamKey::Kind::Merge, ParamKey::kShared});
}

TEST_CASE("uPTN schema: 22 word keys + 1 merge + 1 classifier") {
    const ModelConfig cfg = ptn_config(Sharing::Uniform, 200);
    const StoreSchema schema = schema_for(cfg);
    int words = 0;
    int merges = 0;
    int classifiers = 0;
    int filters = 0;
    for (const auto& [key, len] : schema.keys) {
        switch (key.kind) {
        case ParamKey::Kind::Word:
            ++words;
            break;
        case ParamKey::Kind::Merge:
            ++merges;
            break;
        case ParamKey::Kind::Classifier:
            ++classifiers;
            break;
        case ParamKey::Kind::Filter:
            ++filters;
            break;
        }
    }
    CHECK(words == 22);
    CHECK(merges == 1);
    CHECK(classifiers == 1);
    CHECK(filters == 0);
}

TEST_CASE("hPTN(200) schema has 199 distinct merge keys") {
    const ModelConfig cfg = ptn_config(Sharing::Hierarchical, 200);
    const StoreSchema schema = schema_for(cfg);
    std::set<int> positions;
    for (const auto& [key, len] : schema.keys) {
        if (key.kind == ParamKey::Kind::Merge) {
            positions.insert(key.index);
        }
    }
    CHECK(positions.size() == 199);
    CHECK(*positions.begin() == 1);
    CHECK(*positions.rbegin() == 199);
}

TEST_CASE("diagram schema agrees with config schema for full-length input") {
    ModelConfig cfg = ptn_config(Sharing::Hierarchical, 6, /*vocab=*/4);
    std::vector<int> tokens{0, 1, 2, 3, 0, 1}; // uses the whole vocabulary
    const StoreSchema from_diagram = schema_for(build_ptn(tokens), cfg);
    const StoreSchema from_config = schema_for(cfg);
    CHECK(from_diagram.keys == from_config.keys);
}

TEST_CASE("hCTN schema keys filters per level below the root") {
    ModelConfig cfg;
    cfg.topology = Topology::Convolutional;
    cfg.sharing = Sharing::Hierarchical;
    cfg.vocab_size = 5;
    cfg.pad_token = 4;
    cfg.max_len = 8; // 3 levels
    const StoreSchema schema = schema_for(cfg);
    std::set<int> merge_layers;
    std::set<int> filter_layers;
    for (const auto& [key, len] : schema.keys) {
        if (key.kind == ParamKey::Kind::Merge) {
            merge_layers.insert(key.index);
        }
        if (key.kind == ParamKey::Kind::Filter) {
            filter_layers.insert(key.index);
        }
    }
    CHECK(merge_layers == std::set<int>{1, 2, 3});
    CHECK(filter_layers == std::set<int>{1, 2});
}

TEST_CASE("init_params is bitwise deterministic per seed") {
    const ModelConfig cfg = ptn_config(Sharing::Hierarchical, 16);
    const StoreSchema schema = schema_for(cfg);
    const ParamStore a = init_params(schema, cfg.sharing, 42);
    const ParamStore b = init_params(schema, cfg.sharing, 42);
    const ParamStore c = init_params(schema, cfg.sharing, 43);
    CHECK(a == b);
    CHECK(a.entries.size() == schema.keys.size());
    CHECK_FALSE(a == c);
    for (const auto& [key, v] : a.entries) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            CHECK(v(i) > -M_PI);
            CHECK(v(i) < M_PI);
        }
    }
}

TEST_CASE("mutating a shared vector changes every merge; a positional one "
          "only its own") {
    const std::vector<int> tokens{0, 1, 2, 3};

    // uniform: all merges read through the shared key
    {
        const ModelConfig cfg = ptn_config(Sharing::Uniform, 4);
        ParamStore store = init_params(schema_for(cfg), cfg.sharing, 7);
        const SchemeDiagram d = build_ptn(tokens);
        std::vector<ParamKey> keys;
        for (const Box& b : d.boxes) {
            if (b.role == BoxRole::Merge) {
                keys.push_back(instantiate_box(b, cfg, store).key);
            }
        }
        store.entries.at({ParamKey::Kind::Merge, ParamKey::kShared})(0) += 1.0;
        for (const ParamKey& k : keys) {
            CHECK(store.entries.at(k)(0) ==
                  store.entries.at(
                      {ParamKey::Kind::Merge, ParamKey::kShared})(0));
        }
    }

    // hierarchical: distinct keys, mutation stays local
    {
        const ModelConfig cfg = ptn_config(Sharing::Hierarchical, 4);
        ParamStore store = init_params(schema_for(cfg), cfg.sharing, 7);
        const double before = store.entries.at({ParamKey::Kind::Merge, 2})(0);
        store.entries.at({ParamKey::Kind::Merge, 1})(0) += 1.0;
        CHECK(store.entries.at({ParamKey::Kind::Merge, 2})(0) == before);
    }
}

TEST_CASE("instantiate_box validates the store") {
    const ModelConfig cfg = ptn_config(Sharing::Hierarchical, 4);
    Box word{0, BoxRole::Word, 3, 0, 0, 0, 1};
    ParamStore empty;
    CHECK_THROWS_AS(instantiate_box(word, cfg, empty), Error);
    try {
        instantiate_box(word, cfg, empty);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnboundParameters);
    }

    ParamStore bad;
    bad.entries.emplace(ParamKey{ParamKey::Kind::Word, 3},
                        Eigen::VectorXd::Zero(5));
    try {
        instantiate_box(word, cfg, bad);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ParamShapeMismatch);
    }
}

TEST_CASE("per-role overrides change the instantiated family") {
    ModelConfig cfg = ptn_config(Sharing::Hierarchical, 4);
    cfg.family_overrides[BoxRole::Classifier] = Family::Sim15;
    cfg.depth_overrides[BoxRole::Classifier] = 2;
    Box cls{9, BoxRole::Classifier, -1, 4, 0, 1, 1};
    const BoundBox bb = instantiate_box(cls, cfg);
    CHECK(bb.seq.n_params == param_count(Family::Sim15, 1, 2));
    const StoreSchema schema = schema_for(cfg);
    for (const auto& [key, len] : schema.keys) {
        if (key.kind == ParamKey::Kind::Classifier) {
            CHECK(len == param_count(Family::Sim15, 1, 2));
        }
    }
}

TEST_CASE("param keys round trip through their string form") {
    const std::vector<ParamKey> keys{
        {ParamKey::Kind::Word, 13},
        {ParamKey::Kind::Merge, ParamKey::kShared},
        {ParamKey::Kind::Merge, 7},
        {ParamKey::Kind::Filter, 2},
        {ParamKey::Kind::Classifier, 0},
    };
    for (const ParamKey& k : keys) {
        CHECK(ParamKey::parse(k.str()) == k);
    }
}

TEST_CASE("export_circuit lists every gate once") {
    const GateSequence seq = build_circuit(Family::Sim14, 2, 1);
    const std::string text = export_circuit(seq, {ParamKey::Kind::Merge, 1});
    CHECK(std::count(text.begin(), text.end(), '\n') ==
          static_cast<long>(seq.gates.size()));
}
