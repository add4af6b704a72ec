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
#include <vector>

#include "qtnseq/engine.hpp"
#include "qtnseq/error.hpp"
#include "qtnseq/linalg.hpp"
#include "qtnseq/rng.hpp"

using namespace qtn;

namespace {

ModelConfig make_config(Topology topology, int q, int depth,
                        Family family = Family::Sim14,
                        Sharing sharing = Sharing::Hierarchical) {
    ModelConfig c;
    c.topology = topology;
    c.sharing = sharing;
    c.family = family;
    c.q = q;
    c.depth = depth;
    c.vocab_size = 4;
    c.pad_token = 3;
    c.max_len = 16;
    return c;
}

std::vector<int> tokens_of_length(int n) {
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i) {
        t[i] = (i * 2 + 1) % 3;
    }
    return t;
}

ParamStore store_for(const SchemeDiagram& d, const ModelConfig& cfg,
                     std::uint64_t seed) {
    return init_params(schema_for(d, cfg), cfg.sharing, seed);
}

ParamStore zero_store(const SchemeDiagram& d, const ModelConfig& cfg) {
    ParamStore s = store_for(d, cfg, 1);
    for (auto& [key, v] : s.entries) {
        v.setZero();
    }
    return s;
}

/// Re-derive high-water mark and reduce count from the stage list alone.
std::pair<int, int> walk_plan(const CircuitPlan& p) {
    int live = 0;
    int high = 0;
    int reduces = 0;
    for (const Stage& s : p.stages) {
        if (const auto* in = std::get_if<IntroduceStage>(&s)) {
            live += in->n_qubits;
            high = std::max(high, live);
        } else if (const auto* rd = std::get_if<ReduceStage>(&s)) {
            live -= static_cast<int>(rd->qubits.size());
            ++reduces;
        }
    }
    return {high, reduces};
}

/// Staged postselect state vs full-register oracle, per amplitude.
double state_oracle_gap(const SchemeDiagram& d, const ModelConfig& cfg,
                        const ParamStore& store) {
    const CircuitPlan p = plan(d, cfg);
    EvalTrace trace;
    eval(p, store, Mode::Postselect, {}, &trace);
    const VectorXc full = brute_force_state(d, cfg, store);
    const int total = d.padded_length * cfg.q;
    const int shift = total - cfg.q;
    double gap = 0.0;
    for (Eigen::Index i = 0; i < full.size(); ++i) {
        const Eigen::Index carry = i >> shift;
        const Complex want =
            (i == (carry << shift)) ? trace.psi_final(carry) : Complex{0, 0};
        gap = std::max(gap, std::abs(full(i) - want));
    }
    return gap;
}

double density_oracle_gap(const SchemeDiagram& d, const ModelConfig& cfg,
                          const ParamStore& store) {
    const CircuitPlan p = plan(d, cfg);
    EvalTrace trace;
    eval(p, store, Mode::Discard, {}, &trace);
    const MatrixXc full = brute_force_density(d, cfg, store);
    return (full - trace.rho_final).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("ptn plan keeps at most 2q qubits live") {
    const ModelConfig cfg = make_config(Topology::Path, 1, 1);
    const CircuitPlan p = plan(build_ptn(tokens_of_length(4)), cfg);
    const auto [high, reduces] = walk_plan(p);
    CHECK(high == 2);
    CHECK(p.high_water == 2);
    CHECK(reduces == 3);
}

TEST_CASE("ctn plan peaks at the leaf layer") {
    const ModelConfig cfg = make_config(Topology::Convolutional, 1, 1);
    const CircuitPlan p = plan(build_ctn(tokens_of_length(4), 3), cfg);
    const auto [high, reduces] = walk_plan(p);
    CHECK(high == 4);
    CHECK(p.high_water == 4);
    CHECK(reduces == 3);
}

TEST_CASE("ptn N=200 q=2: high water 4, 199 reduce events") {
    const ModelConfig cfg = make_config(Topology::Path, 2, 1);
    const CircuitPlan p = plan(build_ptn(tokens_of_length(200)), cfg);
    const auto [high, reduces] = walk_plan(p);
    CHECK(high == 4);
    CHECK(reduces == 199);
    CHECK(p.reduce_events == 199);
}

TEST_CASE("plan rejects an invalid diagram") {
    SchemeDiagram d = build_ptn(tokens_of_length(3));
    d.wires.pop_back(); // sever the diagram output
    const ModelConfig cfg = make_config(Topology::Path, 1, 1);
    CHECK_THROWS_AS(plan(d, cfg), Error);
    try {
        plan(d, cfg);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::PlanOnInvalidDiagram);
    }
}

TEST_CASE("all-zero sim14 parameters leave |0..0> untouched") {
    for (Topology t : {Topology::Path, Topology::Convolutional}) {
        const ModelConfig cfg = make_config(t, 1, 1);
        const SchemeDiagram d = t == Topology::Path
                                    ? build_ptn(tokens_of_length(4))
                                    : build_ctn(tokens_of_length(4), 3);
        const ParamStore store = zero_store(d, cfg);
        const Outcome out = eval_postselect(plan(d, cfg), store);
        CHECK(out.p0 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.raw_weight == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("bell pair: postselecting the second qubit on <0|") {
    // hand-built plan: H on q0, CNOT(q0 -> q1), then eliminate q1
    CircuitPlan p;
    GateSequence seq;
    seq.n_qubits = 2;
    seq.n_params = 0;
    seq.gates.push_back({GateKind::H, 0});
    seq.gates.push_back({GateKind::CNOT, 0, 1});
    p.stages.push_back(IntroduceStage{2});
    p.stages.push_back(
        ApplyStage{seq, {ParamKey::Kind::Classifier, 0}, {0, 1}});
    p.stages.push_back(ReduceStage{{1}});
    p.measure_qubit = 0;
    p.final_qubits = 1;

    ParamStore store;
    store.entries.emplace(ParamKey{ParamKey::Kind::Classifier, 0},
                          Eigen::VectorXd::Zero(0));

    const Outcome post = eval_postselect(p, store);
    CHECK(post.raw_weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(post.p0 == doctest::Approx(1.0).epsilon(1e-12));

    // discarding half a bell pair leaves the maximally mixed qubit
    const Outcome disc = eval_discard(p, store);
    CHECK(disc.p0 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(disc.p1 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("discarding one qubit of a product state is exact") {
    // Ry(a) on q0, Ry(b) on q1, trace q1 -> pure |psi><psi| on q0
    const double a = 0.83;
    const double b = -1.27;
    CircuitPlan p;
    GateSequence seq;
    seq.n_qubits = 2;
    seq.n_params = 2;
    seq.gates.push_back({GateKind::Ry, 0, -1, 0});
    seq.gates.push_back({GateKind::Ry, 1, -1, 1});
    p.stages.push_back(IntroduceStage{2});
    p.stages.push_back(
        ApplyStage{seq, {ParamKey::Kind::Classifier, 0}, {0, 1}});
    p.stages.push_back(ReduceStage{{1}});
    p.measure_qubit = 0;
    p.final_qubits = 1;

    ParamStore store;
    Eigen::VectorXd angles(2);
    angles << a, b;
    store.entries.emplace(ParamKey{ParamKey::Kind::Classifier, 0}, angles);

    EvalTrace trace;
    eval(p, store, Mode::Discard, {}, &trace);
    MatrixXc expect(2, 2);
    const double c = std::cos(a / 2.0);
    const double s = std::sin(a / 2.0);
    expect << c * c, c * s, s * c, s * s;
    CHECK((trace.rho_final - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("reduction-free diagrams: postselect and discard agree") {
    for (Topology t : {Topology::Path, Topology::Convolutional}) {
        const ModelConfig cfg = make_config(t, 1, 1);
        const SchemeDiagram d = t == Topology::Path
                                    ? build_ptn(tokens_of_length(1))
                                    : build_ctn(tokens_of_length(1), 3);
        const ParamStore store = store_for(d, cfg, 5);
        const CircuitPlan p = plan(d, cfg);
        const Outcome a = eval_postselect(p, store);
        const Outcome b = eval_discard(p, store);
        CHECK(std::abs(a.p0 - b.p0) < 1e-10);
        CHECK(std::abs(a.p1 - b.p1) < 1e-10);
        CHECK(a.raw_weight == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("N=1 oracle equals the composed word+classifier unitary column 0") {
    const ModelConfig cfg = make_config(Topology::Path, 1, 1);
    const SchemeDiagram d = build_ptn(std::vector<int>{2});
    const ParamStore store = store_for(d, cfg, 6);
    const VectorXc full = brute_force_state(d, cfg, store);

    const GateSequence seq = build_circuit(Family::Sim14, 1, 1);
    auto params_of = [&](const ParamKey& k) {
        const Eigen::VectorXd& v = store.entries.at(k);
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    const MatrixXc u_word =
        unitary_of(seq, params_of({ParamKey::Kind::Word, 2}));
    const MatrixXc u_cls =
        unitary_of(seq, params_of({ParamKey::Kind::Classifier, 0}));
    const VectorXc expect = (u_cls * u_word).col(0);
    CHECK((full - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("staged postselect matches the full-state oracle") {
    std::uint64_t seed = 300;
    for (Topology t : {Topology::Path, Topology::Convolutional}) {
        for (int n = 2; n <= 6; ++n) {
            for (int q = 1; q <= 2; ++q) {
                const ModelConfig cfg = make_config(t, q, 1);
                const SchemeDiagram d =
                    t == Topology::Path
                        ? build_ptn(tokens_of_length(n))
                        : build_ctn(tokens_of_length(n), cfg.pad_token);
                if (d.padded_length * q > 14) {
                    continue;
                }
                const ParamStore store = store_for(d, cfg, seed++);
                CHECK(state_oracle_gap(d, cfg, store) < 1e-10);
            }
        }
    }
}

TEST_CASE("staged discard matches the full-density oracle") {
    std::uint64_t seed = 400;
    for (Topology t : {Topology::Path, Topology::Convolutional}) {
        for (int n = 2; n <= 6; ++n) {
            for (int q = 1; q <= 2; ++q) {
                const ModelConfig cfg = make_config(t, q, 1);
                const SchemeDiagram d =
                    t == Topology::Path
                        ? build_ptn(tokens_of_length(n))
                        : build_ctn(tokens_of_length(n), cfg.pad_token);
                if (d.padded_length * q > 7) {
                    continue;
                }
                const ParamStore store = store_for(d, cfg, seed++);
                CHECK(density_oracle_gap(d, cfg, store) < 1e-10);
            }
        }
    }
}

TEST_CASE("staged evaluation matches oracles across families and depths") {
    std::uint64_t seed = 500;
    for (Family f : {Family::Sim15, Family::IQP}) {
        for (int depth = 1; depth <= 2; ++depth) {
            const ModelConfig cfg = make_config(Topology::Path, 1, depth, f);
            const SchemeDiagram d = build_ptn(tokens_of_length(5));
            const ParamStore store = store_for(d, cfg, seed++);
            CHECK(state_oracle_gap(d, cfg, store) < 1e-10);
            CHECK(density_oracle_gap(d, cfg, store) < 1e-10);
        }
    }
}

TEST_CASE("discard mass and purity behave at every stage") {
    const ModelConfig cfg = make_config(Topology::Convolutional, 1, 1);
    const SchemeDiagram d = build_ctn(tokens_of_length(4), cfg.pad_token);
    const ParamStore store = store_for(d, cfg, 7);
    double max_purity = 0.0;
    const StageObserver observer = [&](const MatrixXc& rho, int) {
        max_purity = std::max(max_purity, (rho * rho).trace().real());
        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
        CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<MatrixXc> eig(rho);
        CHECK(eig.eigenvalues().minCoeff() > -1e-10);
    };
    const Outcome out = eval_discard(plan(d, cfg), store, &observer);
    CHECK(max_purity <= 1.0 + 1e-10);
    CHECK(out.raw_weight == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("postselecting an orthogonal branch is degenerate") {
    CircuitPlan p;
    GateSequence seq;
    seq.n_qubits = 2;
    seq.n_params = 1;
    seq.gates.push_back({GateKind::Ry, 1, -1, 0}); // flips q1 to |1>
    p.stages.push_back(IntroduceStage{2});
    p.stages.push_back(
        ApplyStage{seq, {ParamKey::Kind::Classifier, 0}, {0, 1}});
    p.stages.push_back(ReduceStage{{1}});
    p.measure_qubit = 0;
    p.final_qubits = 1;
    ParamStore store;
    Eigen::VectorXd angle(1);
    angle << M_PI;
    store.entries.emplace(ParamKey{ParamKey::Kind::Classifier, 0}, angle);
    CHECK_THROWS_AS(eval_postselect(p, store), Error);
    try {
        eval_postselect(p, store);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DegeneratePostselection);
    }
}

TEST_CASE("oracles refuse oversized registers") {
    const ModelConfig cfg = make_config(Topology::Path, 2, 1);
    const SchemeDiagram d = build_ptn(tokens_of_length(8)); // 16 qubits
    const ParamStore store = store_for(d, cfg, 8);
    CHECK_THROWS_AS(brute_force_state(d, cfg, store), Error);
    const SchemeDiagram d2 = build_ptn(tokens_of_length(5)); // 10 > 7
    const ParamStore store2 = store_for(d2, cfg, 9);
    CHECK_THROWS_AS(brute_force_density(d2, cfg, store2), Error);
}

TEST_CASE("missing store entry raises UnboundParameters at eval") {
    const ModelConfig cfg = make_config(Topology::Path, 1, 1);
    const SchemeDiagram d = build_ptn(tokens_of_length(3));
    ParamStore store = store_for(d, cfg, 10);
    store.entries.erase(ParamKey{ParamKey::Kind::Merge, 2});
    try {
        eval_postselect(plan(d, cfg), store);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnboundParameters);
    }
}

TEST_CASE("export_plan line count covers every gate") {
    const ModelConfig cfg = make_config(Topology::Path, 1, 1);
    const SchemeDiagram d = build_ptn(tokens_of_length(3));
    const CircuitPlan p = plan(d, cfg);
    const std::string text = export_plan(p);
    long gate_lines = 0;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '#') {
            ++gate_lines;
        }
    }
    // 3 words x 3 gates + 2 merges x 8 gates + classifier x 3
    CHECK(gate_lines == 3 * 3 + 2 * 8 + 3);
}
