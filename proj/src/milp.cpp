/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The bbmdp authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bbmdp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bbmdp/error.hpp"

namespace bbmdp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::MalformedDocument: return "malformed document";
    case ErrorCode::SchemaViolation: return "schema violation";
    case ErrorCode::LpIterationLimit: return "LP iteration limit";
    case ErrorCode::PreconditionViolated: return "precondition violated";
    case ErrorCode::CapExceeded: return "enumeration cap exceeded";
    case ErrorCode::ResampleLimit: return "resample limit exceeded";
    case ErrorCode::NumericFailure: return "numeric failure";
    case ErrorCode::Io: return "I/O error";
  }
  return "unknown error";
}

bool MilpInstance::is_integer(VarIndex j) const {
  return std::find(integer_indices.begin(), integer_indices.end(), j) != integer_indices.end();
}

std::vector<std::string> validate(const MilpInstance& instance) {
  std::vector<std::string> out;
  const std::size_t n = instance.num_vars;
  if (instance.objective.size() != n) out.push_back("objective length differs from num_vars");
  if (instance.lower.size() != n) out.push_back("lower length differs from num_vars");
  if (instance.upper.size() != n) out.push_back("upper length differs from num_vars");
  if (!out.empty()) return out;

  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(instance.objective[j]) || std::isinf(instance.objective[j]))
      out.push_back("non-finite objective at var " + std::to_string(j));
    if (std::isnan(instance.lower[j]) || std::isnan(instance.upper[j]) ||
        instance.lower[j] == kInf || instance.upper[j] == -kInf)
      out.push_back("invalid bound at var " + std::to_string(j));
    else if (instance.lower[j] > instance.upper[j])
      out.push_back("bound crossing at var " + std::to_string(j));
  }

  std::set<VarIndex> seen;
  for (VarIndex j : instance.integer_indices) {
    if (j >= n) {
      out.push_back("integer index out of range " + std::to_string(j));
      continue;
    }
    if (!seen.insert(j).second) out.push_back("duplicate integer index " + std::to_string(j));
    if (!std::isfinite(instance.lower[j]) || !std::isfinite(instance.upper[j]))
      out.push_back("unbounded integer var " + std::to_string(j));
  }

  for (std::size_t i = 0; i < instance.rows.size(); ++i) {
    const Row& row = instance.rows[i];
    if (!std::isfinite(row.rhs)) out.push_back("non-finite rhs at row " + std::to_string(i));
    std::set<VarIndex> cols;
    for (const RowEntry& e : row.coeffs) {
      if (e.col >= n) out.push_back("column out of range in row " + std::to_string(i));
      if (!cols.insert(e.col).second)
        out.push_back("duplicate column " + std::to_string(e.col) + " in row " + std::to_string(i));
      if (!std::isfinite(e.val)) out.push_back("non-finite coefficient in row " + std::to_string(i));
    }
  }
  return out;
}

void require_valid(const MilpInstance& instance) {
  const auto violations = validate(instance);
  if (violations.empty()) return;
  std::string msg = "invalid instance '" + instance.name + "':";
  for (const auto& v : violations) msg += " " + v + ";";
  throw Error(ErrorCode::InvalidArgument, msg);
}

void apply_bound_change(std::vector<double>& lower, std::vector<double>& upper,
                        const BoundChange& change) {
  if (change.var >= lower.size())
    throw Error(ErrorCode::InvalidArgument, "bound change index out of range");
  if (change.direction == BoundDirection::TightenUpper)
    upper[change.var] = std::min(upper[change.var], change.value);
  else
    lower[change.var] = std::max(lower[change.var], change.value);
}

MilpInstance apply_bound_change(const MilpInstance& instance, const BoundChange& change) {
  if (change.var >= instance.num_vars)
    throw Error(ErrorCode::InvalidArgument, "bound change index out of range");
  if (instance.is_integer(change.var) && change.value != std::floor(change.value))
    throw Error(ErrorCode::InvalidArgument, "non-integral bound change on integer var");
  MilpInstance child = instance;
  apply_bound_change(child.lower, child.upper, change);
  return child;
}

double dot_objective(const MilpInstance& instance, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < instance.num_vars; ++j) s += instance.objective[j] * x[j];
  return s;
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void schema(const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "instance schema violation: " + what);
}

double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) schema(where + " is not a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema(where + " is not finite");
  return d;
}

double bound_value(const json& v, bool is_lower, const std::string& where) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (is_lower && s == "-inf") return -kInf;
    if (!is_lower && s == "+inf") return kInf;
    schema(where + " has unsupported sentinel '" + s + "'");
  }
  return finite_number(v, where);
}

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) schema(std::string("missing \"") + key + "\"");
  return *it;
}

std::vector<double> number_array(const json& doc, const char* key) {
  const json& arr = field(doc, key);
  if (!arr.is_array()) schema(std::string("\"") + key + "\" is not an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(finite_number(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
  return out;
}

ordered_json bound_json(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  return v;
}

}  // namespace

MilpInstance parse_instance(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("malformed instance document: ") + e.what());
  }
  if (!doc.is_object()) schema("top level is not an object");

  MilpInstance inst;
  const json& name = field(doc, "name");
  if (!name.is_string()) schema("\"name\" is not a string");
  inst.name = name.get<std::string>();

  const json& nv = field(doc, "num_vars");
  if (!nv.is_number_unsigned() && !(nv.is_number_integer() && nv.get<long long>() >= 0))
    schema("\"num_vars\" is not a non-negative integer");
  inst.num_vars = nv.get<std::size_t>();

  inst.objective = number_array(doc, "objective");

  for (const char* key : {"lower", "upper"}) {
    const bool is_lower = std::string_view(key) == "lower";
    const json& arr = field(doc, key);
    if (!arr.is_array()) schema(std::string("\"") + key + "\" is not an array");
    auto& dst = is_lower ? inst.lower : inst.upper;
    for (std::size_t i = 0; i < arr.size(); ++i)
      dst.push_back(bound_value(arr[i], is_lower, std::string(key) + "[" + std::to_string(i) + "]"));
  }

  const json& ints = field(doc, "integer");
  if (!ints.is_array()) schema("\"integer\" is not an array");
  for (const auto& v : ints) {
    if (!v.is_number_integer() || v.get<long long>() < 0) schema("\"integer\" entry is not an index");
    inst.integer_indices.push_back(v.get<VarIndex>());
  }

  const json& rows = field(doc, "rows");
  if (!rows.is_array()) schema("\"rows\" is not an array");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& r = rows[i];
    const std::string where = "rows[" + std::to_string(i) + "]";
    if (!r.is_object()) schema(where + " is not an object");
    Row row;
    row.rhs = finite_number(field(r, "rhs"), where + ".rhs");
    const json& coeffs = field(r, "coeffs");
    if (!coeffs.is_array()) schema(where + ".coeffs is not an array");
    for (const auto& pair : coeffs) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
          pair[0].get<long long>() < 0)
        schema(where + " has a malformed [col, val] pair");
      row.coeffs.push_back({pair[0].get<VarIndex>(), finite_number(pair[1], where + " coefficient")});
    }
    std::sort(row.coeffs.begin(), row.coeffs.end(),
              [](const RowEntry& a, const RowEntry& b) { return a.col < b.col; });

    std::string sense = "<=";
    if (auto it = r.find("sense"); it != r.end()) {
      if (!it->is_string()) schema(where + ".sense is not a string");
      sense = it->get<std::string>();
    }
    if (sense == "<=") {
      inst.rows.push_back(std::move(row));
    } else if (sense == ">=" || sense == "=") {
      Row neg = row;
      for (auto& e : neg.coeffs) e.val = -e.val;
      neg.rhs = -neg.rhs;
      if (sense == "=") inst.rows.push_back(std::move(row));
      inst.rows.push_back(std::move(neg));
    } else {
      schema(where + " has unknown sense '" + sense + "'");
    }
  }

  if (inst.objective.size() != inst.num_vars || inst.lower.size() != inst.num_vars ||
      inst.upper.size() != inst.num_vars)
    schema("vector lengths disagree with num_vars");
  return inst;
}

std::string serialize_instance(const MilpInstance& instance) {
  ordered_json doc;
  doc["name"] = instance.name;
  doc["num_vars"] = instance.num_vars;
  doc["objective"] = instance.objective;
  ordered_json lower = ordered_json::array(), upper = ordered_json::array();
  for (double v : instance.lower) lower.push_back(bound_json(v));
  for (double v : instance.upper) upper.push_back(bound_json(v));
  doc["lower"] = std::move(lower);
  doc["upper"] = std::move(upper);
  doc["integer"] = instance.integer_indices;
  ordered_json rows = ordered_json::array();
  for (const Row& row : instance.rows) {
    auto sorted = row.coeffs;
    std::sort(sorted.begin(), sorted.end(),
              [](const RowEntry& a, const RowEntry& b) { return a.col < b.col; });
    ordered_json coeffs = ordered_json::array();
    for (const auto& e : sorted) coeffs.push_back(ordered_json::array({e.col, e.val}));
    ordered_json r;
    r["coeffs"] = std::move(coeffs);
    r["rhs"] = row.rhs;
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump();
}

MilpInstance read_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open instance file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

void write_instance_file(const MilpInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write instance file " + path);
  out << serialize_instance(instance) << '\n';
}

}  // namespace bbmdp
