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

#include "qtnseq/ansatz.hpp"

#include <cmath>
#include <sstream>

#include "qtnseq/error.hpp"
#include "qtnseq/linalg.hpp"
#include "qtnseq/rng.hpp"

namespace qtn {

const char* to_string(Family f) {
    switch (f) {
    case Family::Sim14:
        return "sim14";
    case Family::Sim15:
        return "sim15";
    case Family::IQP:
        return "iqp";
    }
    return "?";
}

const char* to_string(Sharing s) {
    return s == Sharing::Uniform ? "uniform" : "hierarchical";
}

const char* to_string(Topology t) {
    return t == Topology::Path ? "ptn" : "ctn";
}

int per_layer_param_count(Family f, int n) {
    switch (f) {
    case Family::Sim14:
        return n >= 2 ? 4 * n : 3;
    case Family::Sim15:
        return n >= 2 ? 2 * n : 2;
    case Family::IQP:
        return n >= 2 ? n - 1 : 1;
    }
    return 0;
}

int param_count(Family f, int n, int depth) {
    return depth * per_layer_param_count(f, n);
}

namespace {

void emit_layer(GateSequence& seq, Family f, int n, int& slot) {
    if (n == 1) {
        // degenerate single-wire forms
        switch (f) {
        case Family::Sim14:
            seq.gates.push_back({GateKind::Ry, 0, -1, slot++});
            seq.gates.push_back({GateKind::Rz, 0, -1, slot++});
            seq.gates.push_back({GateKind::Ry, 0, -1, slot++});
            return;
        case Family::Sim15:
            seq.gates.push_back({GateKind::Ry, 0, -1, slot++});
            seq.gates.push_back({GateKind::Rz, 0, -1, slot++});
            return;
        case Family::IQP:
            seq.gates.push_back({GateKind::H, 0});
            seq.gates.push_back({GateKind::Rz, 0, -1, slot++});
            return;
        }
    }
    switch (f) {
    case Family::Sim14:
        for (int q = 0; q < n; ++q) {
            seq.gates.push_back({GateKind::Ry, q, -1, slot++});
        }
        for (int i = n - 1; i >= 0; --i) {
            seq.gates.push_back({GateKind::CRx, i, (i + 1) % n, slot++});
        }
        for (int q = 0; q < n; ++q) {
            seq.gates.push_back({GateKind::Ry, q, -1, slot++});
        }
        for (int i = 0; i < n; ++i) {
            seq.gates.push_back({GateKind::CRx, (i + 1) % n, i, slot++});
        }
        return;
    case Family::Sim15:
        for (int q = 0; q < n; ++q) {
            seq.gates.push_back({GateKind::Ry, q, -1, slot++});
        }
        for (int i = n - 1; i >= 0; --i) {
            seq.gates.push_back({GateKind::CNOT, i, (i + 1) % n});
        }
        for (int q = 0; q < n; ++q) {
            seq.gates.push_back({GateKind::Ry, q, -1, slot++});
        }
        // second ring runs the first one backwards, so a zero-angle layer
        // composes to the identity
        for (int i = 0; i < n; ++i) {
            seq.gates.push_back({GateKind::CNOT, i, (i + 1) % n});
        }
        return;
    case Family::IQP:
        for (int q = 0; q < n; ++q) {
            seq.gates.push_back({GateKind::H, q});
        }
        for (int j = 0; j + 1 < n; ++j) {
            seq.gates.push_back({GateKind::CRz, j, j + 1, slot++});
        }
        return;
    }
}

} // namespace

GateSequence build_layer(Family f, int n, std::span<const double> params) {
    const int expect = per_layer_param_count(f, n);
    if (static_cast<int>(params.size()) != expect) {
        throw Error(Errc::ParamShapeMismatch,
                    "build_layer: expected " + std::to_string(expect) +
                        " parameters, got " + std::to_string(params.size()));
    }
    GateSequence seq;
    seq.n_qubits = n;
    int slot = 0;
    emit_layer(seq, f, n, slot);
    seq.n_params = slot;
    return seq;
}

GateSequence build_circuit(Family f, int n, int depth) {
    GateSequence seq;
    seq.n_qubits = n;
    int slot = 0;
    for (int d = 0; d < depth; ++d) {
        emit_layer(seq, f, n, slot);
    }
    seq.n_params = slot;
    return seq;
}

std::string ParamKey::str() const {
    switch (kind) {
    case Kind::Word:
        return "word:" + std::to_string(index);
    case Kind::Merge:
        return index == kShared ? "merge:shared"
                                : "merge:" + std::to_string(index);
    case Kind::Filter:
        return index == kShared ? "filter:shared"
                                : "filter:" + std::to_string(index);
    case Kind::Classifier:
        return "classifier";
    }
    return "?";
}

ParamKey ParamKey::parse(const std::string& text) {
    auto tail = [&](const std::string& prefix) {
        return text.substr(prefix.size());
    };
    auto idx = [](const std::string& s) {
        return s == "shared" ? kShared : std::stoi(s);
    };
    if (text == "classifier") {
        return {Kind::Classifier, 0};
    }
    if (text.rfind("word:", 0) == 0) {
        return {Kind::Word, std::stoi(tail("word:"))};
    }
    if (text.rfind("merge:", 0) == 0) {
        return {Kind::Merge, idx(tail("merge:"))};
    }
    if (text.rfind("filter:", 0) == 0) {
        return {Kind::Filter, idx(tail("filter:"))};
    }
    throw Error(Errc::BadCheckpoint, "unparseable parameter key: " + text);
}

int box_width(BoxRole role, int q) {
    switch (role) {
    case BoxRole::Word:
        return q;
    case BoxRole::Filter:
    case BoxRole::Merge:
        return 2 * q;
    case BoxRole::Classifier:
        return q;
    }
    return 0;
}

ParamKey key_for(const Box& box, const ModelConfig& config) {
    switch (box.role) {
    case BoxRole::Word:
        return {ParamKey::Kind::Word, box.token};
    case BoxRole::Classifier:
        return {ParamKey::Kind::Classifier, 0};
    case BoxRole::Merge:
        return {ParamKey::Kind::Merge, config.sharing == Sharing::Uniform
                                           ? ParamKey::kShared
                                           : box.layer};
    case BoxRole::Filter:
        return {ParamKey::Kind::Filter, config.sharing == Sharing::Uniform
                                            ? ParamKey::kShared
                                            : box.layer};
    }
    return {};
}

BoundBox instantiate_box(const Box& box, const ModelConfig& config) {
    BoundBox out;
    out.width = box_width(box.role, config.q);
    out.seq = build_circuit(config.family_of(box.role), out.width,
                            config.depth_of(box.role));
    out.key = key_for(box, config);
    if (box.role == BoxRole::Merge) {
        // keep the first q wires, eliminate the last q
        out.reduce_width = config.q;
    }
    out.measures = box.role == BoxRole::Classifier;
    return out;
}

BoundBox instantiate_box(const Box& box, const ModelConfig& config,
                         const ParamStore& store) {
    BoundBox out = instantiate_box(box, config);
    auto it = store.entries.find(out.key);
    if (it == store.entries.end()) {
        throw Error(Errc::UnboundParameters,
                    "no parameters bound for key " + out.key.str());
    }
    if (static_cast<int>(it->second.size()) != out.seq.n_params) {
        throw Error(Errc::ParamShapeMismatch,
                    "key " + out.key.str() + " has " +
                        std::to_string(it->second.size()) +
                        " values, circuit expects " +
                        std::to_string(out.seq.n_params));
    }
    return out;
}

namespace {

void schema_insert(std::map<ParamKey, int>& acc, const ParamKey& key,
                   int length) {
    acc.emplace(key, length);
}

StoreSchema schema_from_map(const std::map<ParamKey, int>& acc) {
    StoreSchema schema;
    schema.keys.assign(acc.begin(), acc.end());
    return schema;
}

} // namespace

StoreSchema schema_for(const ModelConfig& config) {
    std::map<ParamKey, int> acc;
    auto count_for = [&config](BoxRole role) {
        return param_count(config.family_of(role),
                           box_width(role, config.q), config.depth_of(role));
    };
    const int word_p = count_for(BoxRole::Word);
    for (int t = 0; t < config.vocab_size; ++t) {
        schema_insert(acc, {ParamKey::Kind::Word, t}, word_p);
    }
    schema_insert(acc, {ParamKey::Kind::Classifier, 0},
                  count_for(BoxRole::Classifier));
    const int merge_p = count_for(BoxRole::Merge);
    const int filter_p = count_for(BoxRole::Filter);

    if (config.topology == Topology::Path) {
        if (config.max_len >= 2) {
            if (config.sharing == Sharing::Uniform) {
                schema_insert(acc, {ParamKey::Kind::Merge, ParamKey::kShared},
                              merge_p);
            } else {
                for (int i = 1; i < config.max_len; ++i) {
                    schema_insert(acc, {ParamKey::Kind::Merge, i}, merge_p);
                }
            }
        }
    } else {
        const int padded = next_pow2(config.max_len);
        int levels = 0;
        for (int w = padded; w > 1; w /= 2) {
            ++levels;
        }
        if (levels >= 1) {
            if (config.sharing == Sharing::Uniform) {
                schema_insert(acc, {ParamKey::Kind::Merge, ParamKey::kShared},
                              merge_p);
            } else {
                for (int l = 1; l <= levels; ++l) {
                    schema_insert(acc, {ParamKey::Kind::Merge, l}, merge_p);
                }
            }
        }
        // filters exist on levels with at least 4 live wires
        if (levels >= 2) {
            if (config.sharing == Sharing::Uniform) {
                schema_insert(acc, {ParamKey::Kind::Filter, ParamKey::kShared},
                              filter_p);
            } else {
                for (int l = 1; l < levels; ++l) {
                    schema_insert(acc, {ParamKey::Kind::Filter, l}, filter_p);
                }
            }
        }
    }
    return schema_from_map(acc);
}

StoreSchema schema_for(const SchemeDiagram& diagram,
                       const ModelConfig& config) {
    std::map<ParamKey, int> acc;
    for (const Box& b : diagram.boxes) {
        const int width = box_width(b.role, config.q);
        schema_insert(acc, key_for(b, config),
                      param_count(config.family_of(b.role), width,
                                  config.depth_of(b.role)));
    }
    return schema_from_map(acc);
}

ParamStore init_params(const StoreSchema& schema, Sharing sharing,
                       std::uint64_t seed, InitScheme scheme) {
    ParamStore store;
    store.sharing = sharing;
    Rng rng(seed);
    for (const auto& [key, length] : schema.keys) {
        Eigen::VectorXd v(length);
        for (int i = 0; i < length; ++i) {
            v(i) = scheme == InitScheme::UniformAngle
                       ? rng.uniform(-M_PI, M_PI)
                       : 0.01 * rng.normal();
        }
        store.entries.emplace(key, std::move(v));
    }
    return store;
}

MatrixXc unitary_of(const GateSequence& seq, std::span<const double> params) {
    if (seq.n_qubits > 12) {
        throw Error(Errc::OracleTooLarge,
                    "unitary_of: " + std::to_string(seq.n_qubits) +
                        " qubits exceeds the dense oracle bound");
    }
    if (static_cast<int>(params.size()) != seq.n_params) {
        throw Error(Errc::ParamShapeMismatch,
                    "unitary_of: expected " + std::to_string(seq.n_params) +
                        " parameters, got " + std::to_string(params.size()));
    }
    const std::size_t dim = dim_of(seq.n_qubits);
    MatrixXc u = MatrixXc::Identity(dim, dim);
    for (const Gate& g : seq.gates) {
        const double angle = g.slot >= 0 ? params[g.slot] : 0.0;
        MatrixXc full;
        if (is_two_qubit(g.kind)) {
            const std::array<int, 2> targets{g.q0, g.q1};
            full = embed_operator(gate_matrix_2q(g.kind, angle), targets,
                                  seq.n_qubits);
        } else {
            const std::array<int, 1> targets{g.q0};
            full = embed_operator(gate_matrix_1q(g.kind, angle), targets,
                                  seq.n_qubits);
        }
        u = full * u;
    }
    return u;
}

std::string export_circuit(const GateSequence& seq, const ParamKey& key) {
    std::ostringstream os;
    for (const Gate& g : seq.gates) {
        os << to_string(g.kind) << " q" << g.q0;
        if (g.q1 >= 0) {
            os << ",q" << g.q1;
        }
        if (g.slot >= 0) {
            os << " " << key.str() << "[" << g.slot << "]";
        }
        os << "\n";
    }
    return os.str();
}

} // namespace qtn
