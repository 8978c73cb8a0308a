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
#include <functional>
#include <vector>

#include "bbmdp/env.hpp"
#include "bbmdp/qfunction.hpp"

namespace bbmdp {

enum class LossKind { MSE, HLGaussCE };
enum class TargetKind { BBMDP, TreeMDP };

const char* to_string(LossKind kind);
const char* to_string(TargetKind kind);

struct TargetConfig {
  std::size_t k = 3;
  double reward_per_transition = -1.0;
  LossKind loss = LossKind::HLGaussCE;

  void validate() const;
};

/// Reward accumulated by `expansions` expansions: each adds two nodes and is
/// charged 2 * reward_unit, so reward -1 reproduces the -2 per step of the
/// nodes-added value.
double expansion_constant(std::size_t expansions, double reward_unit);

/// Value of the best action at the node of record `r` (leaves never reach it).
using FrontierValue = std::function<double(std::size_t record)>;

/// max_a q(features, a); with a target network, the online argmax evaluated
/// by the target network. Records must carry features.
FrontierValue greedy_frontier_value(const std::vector<SubtreeRecord>& records, const QFunction& online,
                                    const QFunction* target = nullptr);

/// Index of the greedy row given online values, ties to the lowest row.
std::size_t greedy_row(const std::vector<double>& values);

/// Expansions inside T(o1) and the open frontier left after them, in
/// preorder (minus side first).
struct Frontier {
  std::size_t expansions = 0;
  std::vector<std::size_t> open;  // record indices bootstrapped with FrontierValue
  std::size_t fathomed = 0;       // leaves on the frontier (value 0)
};

/// The realized DFS continuation: the k expansions following o1's selection
/// that lie inside T(o1). Fewer than k means T(o1) closed first.
Frontier bbmdp_frontier(const std::vector<SubtreeRecord>& records, std::size_t record, std::size_t k);

/// Every descendant at relative depth < k is expanded; branched nodes at depth
/// k form the frontier and fathomed nodes above it contribute 0.
Frontier treemdp_frontier(const std::vector<SubtreeRecord>& records, std::size_t record, std::size_t k);

double target_1step(const std::vector<SubtreeRecord>& records, std::size_t record,
                    const FrontierValue& value, const TargetConfig& config);
double target_kstep(const std::vector<SubtreeRecord>& records, std::size_t record,
                    const FrontierValue& value, const TargetConfig& config);
double target_treemdp_kstep(const std::vector<SubtreeRecord>& records, std::size_t record,
                            const FrontierValue& value, const TargetConfig& config, std::size_t k);

struct LossResult {
  double loss = 0.0;
  std::vector<double> gradient;     // dL/dtheta
  std::vector<double> predictions;  // decoded value of each sample
};

/// Mean over the batch of w * (v - t)^2 (MSE) or w * H(encode(t), softmax(q))
/// (HLGaussCE). `x` holds one feature row per sample (the chosen action).
LossResult loss_and_gradient(const QFunction& qfn, const RowMatrix& x, const std::vector<double>& targets,
                             const std::vector<double>& weights, LossKind loss);

}  // namespace bbmdp
