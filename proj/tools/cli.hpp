/*
 * Copyright 2026 The motb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace motb::cli {

/// Process exit codes. Every failure path maps to exactly one of these.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,  // a verification or Monte Carlo diagnostic check failed
  kInvalid = 2,      // bad arguments, malformed spec, marginals not in convex order
  kIo = 3,           // unreadable input or unwritable output
  kNumerical = 4,    // divergent integral, missing root, solver failure
};

inline constexpr const char* kSchemaVersion = "motb/1";

/// Runs one subcommand (bound | forward | verify | dual). `args` excludes the
/// program name. Human-readable messages go to `out` and `err`; artifacts go
/// to the --out directory.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace motb::cli
