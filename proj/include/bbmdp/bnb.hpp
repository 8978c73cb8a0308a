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
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bbmdp/lp_solver.hpp"
#include "bbmdp/milp.hpp"
#include "bbmdp/rng.hpp"

namespace bbmdp {

using NodeId = std::size_t;

enum class NodeStatus { Open, PrunedInfeasible, PrunedByBound, PrunedIntegral, Branched };

const char* to_string(NodeStatus status);

struct BnbNode {
  NodeId id = 0;
  std::optional<NodeId> parent;
  std::vector<BoundChange> bound_changes;  // accumulated from the root
  LpResult lp;
  NodeStatus status = NodeStatus::Open;
  std::size_t depth = 0;
  std::size_t created_at = 0;
  std::optional<std::size_t> selected_at;
  std::optional<double> incumbent_at_selection;
  std::optional<std::size_t> subtree_nodes_added;

  // Bookkeeping beyond the parent links.
  std::optional<NodeId> child_minus;
  std::optional<NodeId> child_plus;
  std::optional<VarIndex> branch_var;
  std::optional<std::size_t> opened_at;  // set iff the node ever entered the open set
  std::optional<std::size_t> closed_at;  // step index at which it left the open set

  double lp_objective() const { return lp.objective.value_or(kInf); }
  bool is_leaf() const { return status != NodeStatus::Branched; }
};

enum class SelectionKind { DFS, BFS, BestBound };
enum class ChildOrder { MinusFirst, PlusFirst };

const char* to_string(SelectionKind kind);
SelectionKind parse_selection_kind(const std::string& name);

struct NodeSelectionPolicy {
  SelectionKind kind = SelectionKind::DFS;
  ChildOrder dfs_child_order = ChildOrder::MinusFirst;
};

/// Running per-variable averages of objective gain per unit of fractionality.
class PseudocostTable {
 public:
  explicit PseudocostTable(std::size_t num_vars = 0) : entries_(num_vars) {}

  void record_down(VarIndex j, double gain_per_unit);
  void record_up(VarIndex j, double gain_per_unit);

  std::size_t down_count(VarIndex j) const { return entries_[j].down_count; }
  std::size_t up_count(VarIndex j) const { return entries_[j].up_count; }
  std::size_t reliability(VarIndex j) const;

  /// Own average when observed, else the average over observed variables,
  /// else `fallback`.
  double down_estimate(VarIndex j, double fallback = 1.0) const;
  double up_estimate(VarIndex j, double fallback = 1.0) const;

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    double down_sum = 0.0;
    std::size_t down_count = 0;
    double up_sum = 0.0;
    std::size_t up_count = 0;
  };
  std::vector<Entry> entries_;
};

/// The BBMDP state: node store, open set, incumbent and global upper bound.
struct SearchTree {
  std::shared_ptr<const MilpInstance> root_instance;
  NodeSelectionPolicy selection;
  std::vector<BnbNode> nodes;
  std::deque<NodeId> open;
  std::optional<Assignment> incumbent;
  double gub = kInf;
  std::size_t step = 0;
  PseudocostTable pseudocosts;
  std::size_t lp_iterations = 0;

  const MilpInstance& instance() const { return *root_instance; }
  bool terminal() const { return open.empty(); }
  std::size_t node_count() const { return nodes.size(); }
  bool is_open(NodeId id) const;
  double root_objective() const;
};

/// True when a node with LP objective `obj` cannot improve `gub` (ties prune).
bool dominated(double obj, double gub);

SearchTree init_tree(const MilpInstance& instance, NodeSelectionPolicy selection = {});
SearchTree init_tree(std::shared_ptr<const MilpInstance> instance, NodeSelectionPolicy selection = {});

/// Variable bounds of the sub-MILP at `id`.
void node_bounds(const SearchTree& tree, NodeId id, std::vector<double>& lower,
                 std::vector<double>& upper);

/// Integer variables fractional in the node's LP point, ascending.
std::vector<VarIndex> fractional_candidates(const SearchTree& tree, NodeId id);

struct Expansion {
  NodeId minus;
  NodeId plus;
};

/// Branches open node `id` on `var`, solves and classifies both children and
/// advances the step counter.
Expansion expand(SearchTree& tree, NodeId id, VarIndex var);

/// o_1 = rho(s); stamps selected_at and incumbent_at_selection.
NodeId select_node(SearchTree& tree);

/// Fills subtree_nodes_added on every node by counting descendants.
void fill_subtree_sizes(SearchTree& tree);

/// Smallest LP objective over open nodes (gub when none are open).
double open_dual_bound(const SearchTree& tree);

// ---------------------------------------------------------------------------
// Branching policies

class BranchingPolicy {
 public:
  virtual ~BranchingPolicy() = default;
  virtual std::string name() const = 0;
  /// Re-seeds any internal randomness; called at the start of every solve.
  virtual void reset(std::uint64_t seed) { (void)seed; }
  /// Returns an element of `candidates` (never empty).
  virtual VarIndex choose(const SearchTree& tree, NodeId node,
                          const std::vector<VarIndex>& candidates) = 0;
};

class RandomBranching final : public BranchingPolicy {
 public:
  explicit RandomBranching(std::uint64_t seed = 0) : rng_(seed) {}
  std::string name() const override { return "random"; }
  void reset(std::uint64_t seed) override { rng_ = SplitMix64(seed); }
  VarIndex choose(const SearchTree&, NodeId, const std::vector<VarIndex>& candidates) override;

 private:
  SplitMix64 rng_;
};

class MostFractionalBranching final : public BranchingPolicy {
 public:
  std::string name() const override { return "mostfrac"; }
  VarIndex choose(const SearchTree& tree, NodeId node,
                  const std::vector<VarIndex>& candidates) override;
};

inline constexpr double kStrongBranchEps = 1e-4;
inline constexpr double kStrongBranchBig = 1e8;

/// Product score of child objective increases; both child LPs are solved
/// without touching the tree.
std::map<VarIndex, double> strong_branching_scores(const SearchTree& tree, NodeId node);
double strong_branching_score(const SearchTree& tree, NodeId node, VarIndex var);

class StrongBranching final : public BranchingPolicy {
 public:
  std::string name() const override { return "sb"; }
  VarIndex choose(const SearchTree& tree, NodeId node,
                  const std::vector<VarIndex>& candidates) override;
};

/// Pseudocost branching with strong-branching fallback for variables with
/// fewer than `reliability` observations in either direction.
class PseudocostBranching final : public BranchingPolicy {
 public:
  explicit PseudocostBranching(std::size_t reliability = 4) : reliability_(reliability) {}
  std::string name() const override { return "pseudocost"; }
  VarIndex choose(const SearchTree& tree, NodeId node,
                  const std::vector<VarIndex>& candidates) override;

 private:
  std::size_t reliability_;
};

VarIndex pseudocost_branch(const SearchTree& tree, NodeId node, const PseudocostTable& stats,
                           std::size_t reliability = 4);

// ---------------------------------------------------------------------------
// Complete solves

struct SolveLimits {
  std::size_t max_nodes = 100000;
  std::size_t max_steps = static_cast<std::size_t>(-1);
};

enum class SolveStatus { Optimal, LimitReached };

const char* to_string(SolveStatus status);

struct SolveReport {
  std::optional<double> objective;
  std::optional<Assignment> incumbent;
  std::size_t node_count = 0;
  std::size_t step_count = 0;
  SolveStatus status = SolveStatus::Optimal;
  SearchTree tree;
  double seconds = 0.0;
  std::size_t lp_iterations = 0;
  double dual_bound = kInf;
  std::string branching;
  std::string selection;
  std::uint64_t seed = 0;
};

SolveReport solve(const MilpInstance& instance, BranchingPolicy& branching,
                  NodeSelectionPolicy selection = {}, SolveLimits limits = {},
                  std::uint64_t seed = 0);

/// JSON object with objective, node/step counts, status, seconds, policy ids and seed.
std::string solve_report_json(const SolveReport& report);

}  // namespace bbmdp
