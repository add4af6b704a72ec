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

#include "qtnseq/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qtnseq/error.hpp"

namespace qtn {

namespace {

constexpr const char* kMagic = "qtnseq-checkpoint v1";

std::string hexfloat(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

BoxRole role_from(const std::string& s) {
    if (s == "word") {
        return BoxRole::Word;
    }
    if (s == "filter") {
        return BoxRole::Filter;
    }
    if (s == "merge") {
        return BoxRole::Merge;
    }
    if (s == "classifier") {
        return BoxRole::Classifier;
    }
    throw Error(Errc::BadCheckpoint, "unknown box role: " + s);
}

Family family_from(const std::string& s) {
    if (s == "sim14") {
        return Family::Sim14;
    }
    if (s == "sim15") {
        return Family::Sim15;
    }
    if (s == "iqp") {
        return Family::IQP;
    }
    throw Error(Errc::BadCheckpoint, "unknown ansatz family: " + s);
}

} // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    const ModelConfig& m = ckpt.model;
    out << kMagic << "\n";
    out << "topology " << to_string(m.topology) << "\n";
    out << "sharing " << to_string(m.sharing) << "\n";
    out << "mode " << to_string(m.mode) << "\n";
    out << "family " << to_string(m.family) << "\n";
    out << "q " << m.q << "\n";
    out << "qprime " << m.qprime << "\n";
    out << "depth " << m.depth << "\n";
    out << "vocab_size " << m.vocab_size << "\n";
    out << "pad_token " << m.pad_token << "\n";
    out << "max_len " << m.max_len << "\n";
    for (const auto& [role, fam] : m.family_overrides) {
        out << "family_override " << to_string(role) << " " << to_string(fam)
            << "\n";
    }
    for (const auto& [role, depth] : m.depth_overrides) {
        out << "depth_override " << to_string(role) << " " << depth << "\n";
    }
    out << "letters " << ckpt.vocab.letters << "\n";
    out << "pad_id " << ckpt.vocab.pad_id << "\n";
    out << "unk_id " << ckpt.vocab.unk_id << "\n";
    out << "entries " << ckpt.store.entries.size() << "\n";
    for (const auto& [key, values] : ckpt.store.entries) {
        out << "key " << key.str() << " " << values.size();
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            out << " " << hexfloat(values(i));
        }
        out << "\n";
    }
    out << "end\n";
}

Checkpoint load_checkpoint(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw Error(Errc::BadCheckpoint,
                    "checkpoint: missing or wrong header");
    }
    Checkpoint ckpt;
    long expected_entries = -1;
    while (std::getline(in, line)) {
        if (line == "end") {
            if (expected_entries >= 0 &&
                static_cast<long>(ckpt.store.entries.size()) !=
                    expected_entries) {
                throw Error(Errc::BadCheckpoint,
                            "checkpoint: entry count mismatch");
            }
            ckpt.store.sharing = ckpt.model.sharing;
            return ckpt;
        }
        std::istringstream ss(line);
        std::string field;
        ss >> field;
        if (field == "topology") {
            std::string v;
            ss >> v;
            ckpt.model.topology =
                v == "ptn" ? Topology::Path : Topology::Convolutional;
        } else if (field == "sharing") {
            std::string v;
            ss >> v;
            ckpt.model.sharing =
                v == "uniform" ? Sharing::Uniform : Sharing::Hierarchical;
        } else if (field == "mode") {
            std::string v;
            ss >> v;
            ckpt.model.mode =
                v == "postselect" ? Mode::Postselect : Mode::Discard;
        } else if (field == "family") {
            std::string v;
            ss >> v;
            ckpt.model.family = family_from(v);
        } else if (field == "q") {
            ss >> ckpt.model.q;
        } else if (field == "qprime") {
            ss >> ckpt.model.qprime;
        } else if (field == "depth") {
            ss >> ckpt.model.depth;
        } else if (field == "vocab_size") {
            ss >> ckpt.model.vocab_size;
        } else if (field == "pad_token") {
            ss >> ckpt.model.pad_token;
        } else if (field == "max_len") {
            ss >> ckpt.model.max_len;
        } else if (field == "family_override") {
            std::string role;
            std::string fam;
            ss >> role >> fam;
            ckpt.model.family_overrides[role_from(role)] = family_from(fam);
        } else if (field == "depth_override") {
            std::string role;
            int depth = 0;
            ss >> role >> depth;
            ckpt.model.depth_overrides[role_from(role)] = depth;
        } else if (field == "letters") {
            ss >> ckpt.vocab.letters;
        } else if (field == "pad_id") {
            ss >> ckpt.vocab.pad_id;
        } else if (field == "unk_id") {
            ss >> ckpt.vocab.unk_id;
        } else if (field == "entries") {
            ss >> expected_entries;
        } else if (field == "key") {
            std::string name;
            long count = 0;
            ss >> name >> count;
            Eigen::VectorXd values(count);
            for (long i = 0; i < count; ++i) {
                std::string token;
                if (!(ss >> token)) {
                    throw Error(Errc::BadCheckpoint,
                                "checkpoint: truncated values for " + name);
                }
                values(i) = std::strtod(token.c_str(), nullptr);
            }
            ckpt.store.entries.emplace(ParamKey::parse(name),
                                       std::move(values));
        } else {
            throw Error(Errc::BadCheckpoint,
                        "checkpoint: unknown field " + field);
        }
    }
    throw Error(Errc::BadCheckpoint, "checkpoint: missing end marker");
}

void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path);
    if (!out) {
        throw Error(Errc::InvalidConfig,
                    "cannot open checkpoint for writing: " + path);
    }
    save_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::InvalidConfig, "cannot open checkpoint: " + path);
    }
    return load_checkpoint(in);
}

} // namespace qtn
