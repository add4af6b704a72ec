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
#include <vector>

namespace qtn {

/// Runs the qtnseq command line (prepare / train / simulate / export).
/// Exit codes: 0 success, 1 internal error, 2 usage or config error.
/// Output streams are injectable so tests can capture them.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

int run_cli(const std::vector<std::string>& args);

} // namespace qtn
