// Copyright 2026 The mapfront Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#ifndef MAPFRONT_CLI_HPP
#define MAPFRONT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mapfront/errors.hpp"

namespace mapfront {

inline constexpr const char* kToolVersion = "0.1.0";

// 0 success, 2 validation or input, 3 budget, 4 numerical failure.
int exit_code_for(ErrorKind kind);

// Runs one subcommand; args excludes the program name. Failures are
// reported on `err` as a JSON object {"error": {kind, message}}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace mapfront

#endif  // MAPFRONT_CLI_HPP
