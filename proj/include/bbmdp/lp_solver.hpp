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
#include <optional>
#include <span>
#include <vector>

#include "bbmdp/milp.hpp"

namespace bbmdp {

/// Primal feasibility tolerance of the simplex.
inline constexpr double kFeasEps = 1e-7;
/// Integrality tolerance.
inline constexpr double kIntEps = 1e-6;

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::optional<std::vector<double>> point;
  std::optional<double> objective;
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
  friend bool operator==(const LpResult&, const LpResult&) = default;
};

/// Solves the LP relaxation (integrality dropped, bounds kept) with a dense
/// bounded-variable primal simplex: artificial Phase 1, Dantzig pricing, and
/// Bland's rule once 3(n+m) iterations have elapsed. Throws
/// Error(LpIterationLimit) after 50(n+m) iterations.
LpResult solve_relaxation(const MilpInstance& instance);

/// Same, with the variable bounds replaced by `lower`/`upper`.
LpResult solve_relaxation(const MilpInstance& instance, std::span<const double> lower,
                          std::span<const double> upper);

/// True iff every integer variable of the optimal point is within `eps` of an integer.
bool is_integral(const LpResult& result, const MilpInstance& instance, double eps = kIntEps);

/// |x - round(x)|
double fractionality(double x);

}  // namespace bbmdp
