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

#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace bbmdp {

using VarIndex = std::size_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance for exact-arithmetic checks on instance data.
inline constexpr double kDataEps = 1e-9;

struct RowEntry {
  VarIndex col = 0;
  double val = 0.0;

  friend bool operator==(const RowEntry&, const RowEntry&) = default;
};

/// One constraint row a^T x <= rhs, stored sparse with entries sorted by column.
struct Row {
  std::vector<RowEntry> coeffs;
  double rhs = 0.0;

  friend bool operator==(const Row&, const Row&) = default;
};

/// min c^T x  s.t.  A x <= b,  l <= x <= u,  x_j integer for j in integer_indices.
struct MilpInstance {
  std::string name;
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<VarIndex> integer_indices;

  std::size_t num_cons() const { return rows.size(); }
  bool is_integer(VarIndex j) const;

  friend bool operator==(const MilpInstance&, const MilpInstance&) = default;
};

struct Assignment {
  std::vector<double> values;
  double objective_value = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

enum class BoundDirection { TightenUpper, TightenLower };

struct BoundChange {
  VarIndex var = 0;
  BoundDirection direction = BoundDirection::TightenUpper;
  double value = 0.0;

  friend bool operator==(const BoundChange&, const BoundChange&) = default;
};

/// Every invariant violation of `instance`; empty iff well-formed.
std::vector<std::string> validate(const MilpInstance& instance);

/// Throws Error(InvalidArgument) listing the violations when `instance` is not valid.
void require_valid(const MilpInstance& instance);

/// Child instance with one bound tightened. Never widens: a change looser than
/// the current bound leaves the instance unchanged.
MilpInstance apply_bound_change(const MilpInstance& instance, const BoundChange& change);

/// Applies `change` to explicit bound vectors (used by the B&B node store).
void apply_bound_change(std::vector<double>& lower, std::vector<double>& upper,
                        const BoundChange& change);

double dot_objective(const MilpInstance& instance, const std::vector<double>& x);

/// Instance file codec. Rows may carry an optional "sense" of "<=", ">=" or
/// "="; they are normalized to <= rows on parse (">=" negated, "=" split).
/// Serialization always emits <= rows without a sense key.
MilpInstance parse_instance(std::string_view bytes);
std::string serialize_instance(const MilpInstance& instance);

MilpInstance read_instance_file(const std::string& path);
void write_instance_file(const MilpInstance& instance, const std::string& path);

}  // namespace bbmdp
