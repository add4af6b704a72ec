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

#include "qtnseq/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "qtnseq/error.hpp"
#include "qtnseq/rng.hpp"

namespace qtn {

int Vocabulary::size() const {
    return static_cast<int>(letters.size()) + (pad_id >= 0 ? 1 : 0) +
           (unk_id >= 0 ? 1 : 0);
}

int Vocabulary::id_of(char c) const {
    const auto pos = letters.find(c);
    return pos == std::string::npos ? -1 : static_cast<int>(pos);
}

std::string Vocabulary::token_name(int id) const {
    if (id >= 0 && id < static_cast<int>(letters.size())) {
        return std::string(1, letters[id]);
    }
    if (id == pad_id) {
        return "<pad>";
    }
    if (id == unk_id) {
        return "<unk>";
    }
    return "<?" + std::to_string(id) + ">";
}

Vocabulary Vocabulary::amino() {
    Vocabulary v;
    v.letters = kAminoLetters;
    v.pad_id = 20;
    v.unk_id = 21;
    return v;
}

Vocabulary Vocabulary::synthetic(int n_letters) {
    Vocabulary v;
    for (int i = 0; i < n_letters; ++i) {
        v.letters.push_back(static_cast<char>('A' + i));
    }
    v.pad_id = n_letters;
    return v;
}

std::vector<FastaRecord> parse_fasta(std::istream& in) {
    std::vector<FastaRecord> out;
    std::string line;
    long line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '>') {
            std::string header = line.substr(1);
            // UniProt style "db|ACCESSION|NAME ...": take the accession
            std::string token = header.substr(0, header.find_first_of(" \t"));
            const auto bar1 = token.find('|');
            std::string id;
            if (bar1 != std::string::npos) {
                const auto bar2 = token.find('|', bar1 + 1);
                id = token.substr(bar1 + 1, bar2 == std::string::npos
                                                ? std::string::npos
                                                : bar2 - bar1 - 1);
            } else {
                id = token;
            }
            out.push_back({id, ""});
            have_header = true;
        } else {
            if (!have_header) {
                throw Error(Errc::MalformedFasta,
                            "fasta: sequence data before any header at line " +
                                std::to_string(line_no));
            }
            for (char c : line) {
                if (!std::isspace(static_cast<unsigned char>(c))) {
                    out.back().sequence.push_back(c);
                }
            }
        }
    }
    return out;
}

LabelMap load_labels_tsv(std::istream& in) {
    LabelMap map;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            continue;
        }
        const std::string id = line.substr(0, tab);
        std::string loc = line.substr(tab + 1);
        std::transform(loc.begin(), loc.end(), loc.begin(), [](char c) {
            return static_cast<char>(
                std::tolower(static_cast<unsigned char>(c)));
        });
        const bool membrane = loc.find("membrane") != std::string::npos;
        const bool cytosol = loc.find("cytosol") != std::string::npos ||
                             loc.find("cytoplasm") != std::string::npos;
        if (membrane && cytosol) {
            ++map.ambiguous;
        } else if (membrane) {
            map.by_id[id] = 1;
        } else if (cytosol) {
            map.by_id[id] = 0;
        } else {
            ++map.unmatched;
        }
    }
    return map;
}

std::vector<SequenceRecord> filter_and_label(
    std::span<const FastaRecord> records, const LabelMap& labels, int min_len,
    int max_len, FilterSummary* summary) {
    FilterSummary local;
    std::vector<SequenceRecord> out;
    const std::string canon = kAminoLetters;
    for (const FastaRecord& r : records) {
        ++local.parsed;
        const int len = static_cast<int>(r.sequence.size());
        if (len < min_len) {
            ++local.dropped_short;
            continue;
        }
        if (len > max_len) {
            ++local.dropped_long;
            continue;
        }
        const auto it = labels.by_id.find(r.id);
        if (it == labels.by_id.end()) {
            ++local.dropped_unlabeled;
            continue;
        }
        SequenceRecord rec{r.id, r.sequence, it->second};
        for (char& c : rec.sequence) {
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (canon.find(c) == std::string::npos) {
                c = 'X'; // tokenizes to UNK
                ++local.unk_substitutions;
            }
        }
        ++local.kept;
        ++local.kept_per_class[static_cast<std::size_t>(rec.label)];
        out.push_back(std::move(rec));
    }
    if (summary) {
        *summary = local;
    }
    return out;
}

std::vector<int> tokenize(const std::string& sequence,
                          const Vocabulary& vocab) {
    std::vector<int> ids;
    ids.reserve(sequence.size());
    for (char c : sequence) {
        const int id = vocab.id_of(c);
        ids.push_back(id >= 0 ? id : vocab.unk_id);
    }
    return ids;
}

std::string detokenize(std::span<const int> tokens, const Vocabulary& vocab) {
    std::string out;
    for (int id : tokens) {
        if (id >= 0 && id < static_cast<int>(vocab.letters.size())) {
            out.push_back(vocab.letters[static_cast<std::size_t>(id)]);
        } else {
            out.push_back('X');
        }
    }
    return out;
}

DatasetSplits split(std::vector<SequenceRecord> records,
                    std::array<double, 3> ratios, std::uint64_t seed) {
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(Errc::InvalidConfig, "split: ratios sum to " +
                                             std::to_string(sum) +
                                             ", expected 1");
    }
    const auto n = static_cast<long>(records.size());
    if (n < 3) {
        throw Error(Errc::TooFewRecords,
                    "split: need at least 3 records, got " +
                        std::to_string(n));
    }
    Rng rng(seed);
    rng.shuffle(records);
    // floor allocation (with an epsilon so exact ratios land on their
    // integer), remainder to train
    const auto n_val = static_cast<long>(
        std::floor(static_cast<double>(n) * ratios[1] + 1e-9));
    const auto n_test = static_cast<long>(
        std::floor(static_cast<double>(n) * ratios[2] + 1e-9));
    const long n_train = n - n_val - n_test;

    DatasetSplits s;
    s.split_seed = seed;
    s.train.assign(records.begin(), records.begin() + n_train);
    s.validation.assign(records.begin() + n_train,
                        records.begin() + n_train + n_val);
    s.test.assign(records.begin() + n_train + n_val, records.end());
    return s;
}

bool has_motif(std::span<const int> tokens, std::pair<int, int> motif) {
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i] == motif.first && tokens[i + 1] == motif.second) {
            return true;
        }
    }
    return false;
}

std::vector<SequenceRecord> synth_motif_dataset(int n_samples, int seq_len,
                                                int vocab_size,
                                                std::pair<int, int> motif,
                                                std::uint64_t seed) {
    if (seq_len < 2) {
        throw Error(Errc::InvalidConfig,
                    "synth_motif_dataset: seq_len must be >= 2");
    }
    if (motif.first < 0 || motif.first >= vocab_size || motif.second < 0 ||
        motif.second >= vocab_size) {
        throw Error(Errc::InvalidMotif,
                    "synth_motif_dataset: motif tokens outside vocabulary");
    }
    const Vocabulary vocab = Vocabulary::synthetic(vocab_size);
    Rng rng(seed);
    std::vector<SequenceRecord> out;
    std::array<int, 2> want{n_samples - n_samples / 2, n_samples / 2};
    std::vector<int> tokens(seq_len);
    long serial = 0;
    while (want[0] > 0 || want[1] > 0) {
        for (int& t : tokens) {
            t = static_cast<int>(rng.uniform_int(
                static_cast<std::uint64_t>(vocab_size)));
        }
        const int label = has_motif(tokens, motif) ? 1 : 0;
        if (want[static_cast<std::size_t>(label)] == 0) {
            continue; // rejection keeps the classes balanced
        }
        --want[static_cast<std::size_t>(label)];
        out.push_back({"synth" + std::to_string(serial++),
                       detokenize(tokens, vocab), label});
    }
    return out;
}

std::vector<SequenceRecord> stratified_subset(
    std::span<const SequenceRecord> records, int n, std::uint64_t seed) {
    std::vector<SequenceRecord> class0;
    std::vector<SequenceRecord> class1;
    for (const SequenceRecord& r : records) {
        (r.label == 0 ? class0 : class1).push_back(r);
    }
    Rng rng(seed);
    rng.shuffle(class0);
    rng.shuffle(class1);
    const int per_class = n / 2;
    if (static_cast<int>(class0.size()) < per_class ||
        static_cast<int>(class1.size()) < per_class) {
        throw Error(Errc::TooFewRecords,
                    "stratified_subset: not enough records per class");
    }
    std::vector<SequenceRecord> out(class0.begin(),
                                    class0.begin() + per_class);
    out.insert(out.end(), class1.begin(), class1.begin() + per_class);
    Rng mix(derive_seed(seed, 1));
    mix.shuffle(out);
    return out;
}

void write_dataset(std::ostream& out,
                   std::span<const SequenceRecord> records) {
    for (const SequenceRecord& r : records) {
        out << r.id << '\t' << r.label << '\t' << r.sequence << '\n';
    }
}

std::vector<SequenceRecord> read_dataset(std::istream& in) {
    std::vector<SequenceRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        SequenceRecord r;
        std::string label;
        if (!std::getline(ss, r.id, '\t') || !std::getline(ss, label, '\t') ||
            !std::getline(ss, r.sequence)) {
            throw Error(Errc::InvalidConfig,
                        "dataset file: malformed line: " + line);
        }
        r.label = std::stoi(label);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace qtn
