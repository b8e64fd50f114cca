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

#include <filesystem>
#include <string>
#include <string_view>

#include "motb/marginal.hpp"
#include "motb/payoff.hpp"

namespace motb {

/// Marginal spec, one of
///   {"type":"atoms","atoms":[[x,p],...]}
///   {"type":"call_curve","strikes":[...],"prices":[...]}
///   {"type":"lognormal","mean":m,"vol":s,"horizon":t}
///   {"type":"uniform","lo":a,"hi":b}
///   {"type":"dirac","level":x}
/// Throws ValidationError naming the offending field as a JSON pointer.
Marginal parse_marginal(std::string_view json_text);

/// Payoff spec, one of
///   {"type":"identity"} | {"type":"power","p":...}
///   {"type":"smoothed_call","strike":...,"eps":...}
///   {"type":"tabulated","knots":[[x,g,dg],...]}
Payoff parse_payoff(std::string_view json_text);

/// Reads a whole file; throws IoError.
std::string read_text_file(const std::filesystem::path& path);

Marginal load_marginal(const std::filesystem::path& path);
Payoff load_payoff(const std::filesystem::path& path);

}  // namespace motb
