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

#include "motb/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "motb/error.hpp"

namespace motb {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
  throw ValidationError("spec field " + (pointer.empty() ? std::string("/") : pointer) + ": " +
                        what);
}

json parse_document(std::string_view text) {
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) fail("", "expected a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("spec is not valid JSON: ") + e.what());
  }
}

const json& member(const json& obj, const std::string& key, const std::string& at) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(at + "/" + key, "missing");
  return *it;
}

double number(const json& v, const std::string& at) {
  if (!v.is_number()) fail(at, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(at, "must be finite");
  return x;
}

double number_field(const json& obj, const std::string& key) {
  return number(member(obj, key, ""), "/" + key);
}

std::vector<double> number_array(const json& obj, const std::string& key) {
  const json& arr = member(obj, key, "");
  if (!arr.is_array()) fail("/" + key, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(number(arr[i], "/" + key + "/" + std::to_string(i)));
  }
  return out;
}

std::vector<std::vector<double>> tuple_array(const json& obj, const std::string& key,
                                             std::size_t arity) {
  const json& arr = member(obj, key, "");
  if (!arr.is_array() || arr.empty()) fail("/" + key, "expected a non-empty array");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = "/" + key + "/" + std::to_string(i);
    if (!arr[i].is_array() || arr[i].size() != arity) {
      fail(at, "expected an array of " + std::to_string(arity) + " numbers");
    }
    std::vector<double> row;
    for (std::size_t k = 0; k < arity; ++k) {
      row.push_back(number(arr[i][k], at + "/" + std::to_string(k)));
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string type_of(const json& doc) {
  const json& t = member(doc, "type", "");
  if (!t.is_string()) fail("/type", "expected a string");
  return t.get<std::string>();
}

// Re-throws validation failures of the constructors with the field prefix.
template <class F>
auto with_context(const std::string& at, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    fail(at, e.what());
  }
}

}  // namespace

Marginal parse_marginal(std::string_view json_text) {
  const json doc = parse_document(json_text);
  const std::string type = type_of(doc);
  if (type == "atoms") {
    std::vector<Atom> atoms;
    const auto rows = tuple_array(doc, "atoms", 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!(rows[i][1] > 0.0)) fail("/atoms/" + std::to_string(i) + "/1", "mass must be positive");
      atoms.push_back({rows[i][0], rows[i][1]});
    }
    return with_context("/atoms", [&] { return Marginal::from_atoms(std::move(atoms)); });
  }
  if (type == "call_curve") {
    const auto strikes = number_array(doc, "strikes");
    const auto prices = number_array(doc, "prices");
    return with_context("/prices", [&] { return Marginal::from_call_curve(strikes, prices); });
  }
  if (type == "lognormal") {
    const double mean = number_field(doc, "mean");
    const double vol = number_field(doc, "vol");
    const double horizon = number_field(doc, "horizon");
    return with_context("", [&] { return Marginal::lognormal(mean, vol, horizon); });
  }
  if (type == "uniform") {
    const double lo = number_field(doc, "lo");
    const double hi = number_field(doc, "hi");
    return with_context("/hi", [&] { return Marginal::uniform(lo, hi); });
  }
  if (type == "dirac") {
    const double level = number_field(doc, "level");
    return Marginal::dirac(level);
  }
  fail("/type", "unknown marginal type \"" + type + "\"");
}

Payoff parse_payoff(std::string_view json_text) {
  const json doc = parse_document(json_text);
  const std::string type = type_of(doc);
  if (type == "identity") return Payoff::identity();
  if (type == "power") {
    const double p = number_field(doc, "p");
    return with_context("/p", [&] { return Payoff::power(p); });
  }
  if (type == "smoothed_call") {
    const double strike = number_field(doc, "strike");
    const double eps = number_field(doc, "eps");
    return with_context("/eps", [&] { return Payoff::smoothed_call(strike, eps); });
  }
  if (type == "tabulated") {
    std::vector<Payoff::TabulatedKnot> knots;
    for (const auto& row : tuple_array(doc, "knots", 3)) knots.push_back({row[0], row[1], row[2]});
    return with_context("/knots", [&] { return Payoff::tabulated(std::move(knots)); });
  }
  fail("/type", "unknown payoff type \"" + type + "\"");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

Marginal load_marginal(const std::filesystem::path& path) {
  try {
    return parse_marginal(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Payoff load_payoff(const std::filesystem::path& path) {
  try {
    return parse_payoff(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace motb
