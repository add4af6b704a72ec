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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qtn {

/// The 20 canonical amino-acid letters, id 0..19 in this order.
inline constexpr const char* kAminoLetters = "ACDEFGHIKLMNPQRSTVWY";

/// Token alphabet with optional PAD/UNK specials. Ids are dense: letters
/// first, then PAD, then UNK (when present).
struct Vocabulary {
    std::string letters;
    int pad_id = -1;
    int unk_id = -1;

    int size() const;
    int id_of(char c) const; // -1 for unknown letters
    std::string token_name(int id) const;

    /// 20 amino acids + PAD (20) + UNK (21); size 22.
    static Vocabulary amino();
    /// First n_letters uppercase letters + PAD; no UNK.
    static Vocabulary synthetic(int n_letters);
};

struct FastaRecord {
    std::string id;
    std::string sequence;
};

/// Order-preserving FASTA reader. Headers reduce to the UniProt accession
/// (the field between the first two '|') or the first whitespace-delimited
/// token. Multi-line sequences are concatenated, whitespace trimmed.
std::vector<FastaRecord> parse_fasta(std::istream& in);

struct LabelMap {
    std::map<std::string, int> by_id;
    long ambiguous = 0; // locations matching both classes
    long unmatched = 0; // locations matching neither
};

/// Two-column TSV (accession, location). Case-insensitive rule:
/// "membrane" -> 1, "cytosol"/"cytoplasm" -> 0, both or neither -> dropped.
LabelMap load_labels_tsv(std::istream& in);

struct SequenceRecord {
    std::string id;
    std::string sequence;
    int label = 0;
};

struct FilterSummary {
    long parsed = 0;
    long kept = 0;
    long dropped_short = 0;
    long dropped_long = 0;
    long dropped_unlabeled = 0;
    long unk_substitutions = 0;
    std::array<long, 2> kept_per_class{0, 0};
};

/// Keeps records with min_len <= length <= max_len (inclusive) and a known
/// label. Letters outside the canonical alphabet are rewritten to 'X' and
/// counted; tokenize maps 'X' (and any other stranger) to UNK.
std::vector<SequenceRecord> filter_and_label(
    std::span<const FastaRecord> records, const LabelMap& labels,
    int min_len = 80, int max_len = 200, FilterSummary* summary = nullptr);

std::vector<int> tokenize(const std::string& sequence,
                          const Vocabulary& vocab);
std::string detokenize(std::span<const int> tokens, const Vocabulary& vocab);

struct DatasetSplits {
    std::vector<SequenceRecord> train;
    std::vector<SequenceRecord> validation;
    std::vector<SequenceRecord> test;
    std::uint64_t split_seed = 0;
};

/// Seeded shuffle then contiguous slices. Validation and test sizes floor
/// their ratios; the remainder goes to train.
DatasetSplits split(std::vector<SequenceRecord> records,
                    std::array<double, 3> ratios, std::uint64_t seed);

/// Motif benchmark: uniform sequences over the synthetic vocabulary,
/// label 1 iff the motif pair occurs adjacently, class-balanced by
/// rejection.
std::vector<SequenceRecord> synth_motif_dataset(int n_samples, int seq_len,
                                                int vocab_size,
                                                std::pair<int, int> motif,
                                                std::uint64_t seed);

/// Whether the motif occurs as an adjacent pair (the labeling rule).
bool has_motif(std::span<const int> tokens, std::pair<int, int> motif);

/// Seeded class-balanced subset of size n (n/2 per class, rounded down).
std::vector<SequenceRecord> stratified_subset(
    std::span<const SequenceRecord> records, int n, std::uint64_t seed);

// Canonical dataset file: one record per line, "id<TAB>label<TAB>sequence".
void write_dataset(std::ostream& out,
                   std::span<const SequenceRecord> records);
std::vector<SequenceRecord> read_dataset(std::istream& in);

} // namespace qtn
