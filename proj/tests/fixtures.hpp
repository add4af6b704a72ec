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

#include <string>

#include "qtnseq/data.hpp"
#include "qtnseq/rng.hpp"

namespace qtn::testing {

struct ProteinFixture {
    std::string fasta;
    std::string labels_tsv;
};

/// UniProt-shaped corpus with a positional signal: membrane records open
/// with a hydrophobic stretch (signal-anchor style) and close polar,
/// cytosolic ones the other way around, so global composition is matched
/// between classes and position carries the label. Lengths span 60..220 so
/// both filter bounds fire; a few records carry nonstandard residues,
/// unmatched locations or ambiguous (dual) locations.
inline ProteinFixture make_protein_fixture(int n_records,
                                           std::uint64_t seed) {
    Rng rng(seed);
    const std::string hydrophobic = "LIVFAW";
    const std::string polar = "EKDSQR";
    const std::string all = kAminoLetters;

    ProteinFixture fx;
    for (int i = 0; i < n_records; ++i) {
        const int label = static_cast<int>(rng.uniform_int(2));
        const int length = 60 + static_cast<int>(rng.uniform_int(161));
        char buf[16];
        std::snprintf(buf, sizeof buf, "Q%05d", i);
        const std::string acc = buf;

        const int head_len = 18 + static_cast<int>(rng.uniform_int(6));
        const std::string& head = label == 1 ? hydrophobic : polar;
        const std::string& tail = label == 1 ? polar : hydrophobic;
        std::string seq;
        for (int k = 0; k < length; ++k) {
            const std::string* pool = &all;
            if (k < head_len) {
                pool = rng.uniform() < 0.8 ? &head : &all;
            } else if (k >= length - head_len) {
                pool = rng.uniform() < 0.8 ? &tail : &all;
            }
            seq.push_back((*pool)[rng.uniform_int(pool->size())]);
        }
        if (rng.uniform() < 0.03) {
            seq[rng.uniform_int(seq.size())] = 'X';
        }
        if (rng.uniform() < 0.02) {
            seq[rng.uniform_int(seq.size())] = 'U';
        }

        fx.fasta += ">sp|" + acc + "|" + acc + "_HUMAN synthetic protein\n";
        for (std::size_t k = 0; k < seq.size(); k += 60) {
            fx.fasta += seq.substr(k, 60) + "\n";
        }

        const double roll = rng.uniform();
        if (roll < 0.04) {
            fx.labels_tsv += acc + "\tSecreted\n"; // unmatched
        } else if (roll < 0.07) {
            fx.labels_tsv += acc + "\tCell membrane; Cytoplasm\n"; // ambiguous
        } else if (label == 1) {
            fx.labels_tsv += acc + "\tCell membrane\n";
        } else {
            fx.labels_tsv +=
                acc + (rng.uniform() < 0.5 ? "\tCytosol\n" : "\tCytoplasm\n");
        }
    }
    return fx;
}

} // namespace qtn::testing
