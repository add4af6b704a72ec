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

#include <iosfwd>
#include <string>

#include "qtnseq/ansatz.hpp"
#include "qtnseq/data.hpp"

namespace qtn {

/// A trained model: its configuration, the token alphabet it was trained
/// over, and the parameter store.
struct Checkpoint {
    ModelConfig model;
    Vocabulary vocab;
    ParamStore store;
};

/// Versioned text format, one "key <name> <len> <values...>" line per store
/// entry in key order. Values are hexfloats, so a save/load round trip is
/// bit-exact.
void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& in);

void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint_file(const std::string& path);

} // namespace qtn
