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
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bbmdp/bnb.hpp"
#include "bbmdp/metrics.hpp"
#include "bbmdp/milp.hpp"
#include "bbmdp/qfunction.hpp"
#include "bbmdp/targets.hpp"

namespace bbmdp {

/// "<branching>[:<checkpoint>][@<selection>]", e.g. "sb", "random@bfs",
/// "dqn:model.qfn@dfs". Branching names: random, mostfrac, sb, pseudocost, dqn.
struct PolicyEntry {
  std::string label;
  std::string branching;
  std::string checkpoint;
  NodeSelectionPolicy selection{};
};

PolicyEntry parse_policy(const std::string& text);
std::unique_ptr<BranchingPolicy> make_policy(const PolicyEntry& entry);

/// Family label of a generated instance name ("setcover-40x80-s3" -> "setcover").
std::string family_of(const MilpInstance& instance);

/// Solves every (policy, instance, seed) cell and aggregates. The reference,
/// when given, drives the normalized score.
EvalReport evaluate(const std::vector<PolicyEntry>& policies, const std::vector<MilpInstance>& instances,
                    const std::vector<std::uint64_t>& seeds, SolveLimits limits = {},
                    std::optional<std::string> reference = std::nullopt);

struct BruteForceResult {
  std::optional<double> objective;  // nullopt: no feasible point
  std::optional<std::vector<double>> point;
  std::size_t evaluations = 0;
};

/// Enumerates every integer assignment; continuous variables are optimized by
/// LP with the integers fixed. Throws Error(CapExceeded) when the integer box
/// holds more than `cap` points.
BruteForceResult brute_force_optimum(const MilpInstance& instance, std::size_t cap = 1u << 20);

struct VerifyCheck {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::string detail;  // first counterexample or summary
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

/// Suites: identities, codec, gradients, oracle, divergence. `scope` is the
/// number of episodes / instances / points (0 picks the suite default).
VerifyReport verify(const std::string& suite, std::size_t scope = 0, std::uint64_t seed = 0,
                    std::size_t k = 3);
std::string verify_json(const VerifyReport& report);

/// Max relative error |a - f| / max(|a|, |f|, 1e-6) between the analytic
/// gradient and central differences with step h, over every parameter.
double gradient_check(const QFunction& qfn, const RowMatrix& x, const std::vector<double>& targets,
                      const std::vector<double>& weights, LossKind loss, double h = 1e-5);

}  // namespace bbmdp
