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

#include "bbmdp/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include <json.hpp>

#include "bbmdp/error.hpp"

namespace bbmdp {

const char* to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::Open: return "open";
    case NodeStatus::PrunedInfeasible: return "pruned_infeasible";
    case NodeStatus::PrunedByBound: return "pruned_by_bound";
    case NodeStatus::PrunedIntegral: return "pruned_integral";
    case NodeStatus::Branched: return "branched";
  }
  return "unknown";
}

const char* to_string(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::DFS: return "dfs";
    case SelectionKind::BFS: return "bfs";
    case SelectionKind::BestBound: return "bestbound";
  }
  return "unknown";
}

SelectionKind parse_selection_kind(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c != '-' && c != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "dfs") return SelectionKind::DFS;
  if (s == "bfs") return SelectionKind::BFS;
  if (s == "bestbound" || s == "best") return SelectionKind::BestBound;
  throw Error(ErrorCode::InvalidArgument, "unknown node selection '" + name + "'");
}

const char* to_string(SolveStatus status) {
  return status == SolveStatus::Optimal ? "Optimal" : "LimitReached";
}

// ---------------------------------------------------------------------------

void PseudocostTable::record_down(VarIndex j, double gain_per_unit) {
  entries_[j].down_sum += gain_per_unit;
  ++entries_[j].down_count;
}

void PseudocostTable::record_up(VarIndex j, double gain_per_unit) {
  entries_[j].up_sum += gain_per_unit;
  ++entries_[j].up_count;
}

std::size_t PseudocostTable::reliability(VarIndex j) const {
  return std::min(entries_[j].down_count, entries_[j].up_count);
}

double PseudocostTable::down_estimate(VarIndex j, double fallback) const {
  if (entries_[j].down_count > 0) return entries_[j].down_sum / static_cast<double>(entries_[j].down_count);
  double sum = 0.0;
  std::size_t seen = 0;
  for (const Entry& e : entries_) {
    if (e.down_count == 0) continue;
    sum += e.down_sum / static_cast<double>(e.down_count);
    ++seen;
  }
  return seen > 0 ? sum / static_cast<double>(seen) : fallback;
}

double PseudocostTable::up_estimate(VarIndex j, double fallback) const {
  if (entries_[j].up_count > 0) return entries_[j].up_sum / static_cast<double>(entries_[j].up_count);
  double sum = 0.0;
  std::size_t seen = 0;
  for (const Entry& e : entries_) {
    if (e.up_count == 0) continue;
    sum += e.up_sum / static_cast<double>(e.up_count);
    ++seen;
  }
  return seen > 0 ? sum / static_cast<double>(seen) : fallback;
}

// ---------------------------------------------------------------------------

bool SearchTree::is_open(NodeId id) const {
  return id < nodes.size() && nodes[id].status == NodeStatus::Open;
}

double SearchTree::root_objective() const {
  if (nodes.empty() || !nodes[0].lp.optimal()) return 0.0;
  return *nodes[0].lp.objective;
}

bool dominated(double obj, double gub) {
  if (!std::isfinite(gub)) return false;
  return obj >= gub - kFeasEps * (1.0 + std::abs(gub));
}

namespace {

Assignment rounded_assignment(const MilpInstance& instance, const std::vector<double>& point) {
  Assignment a;
  a.values = point;
  for (VarIndex j : instance.integer_indices) a.values[j] = std::round(a.values[j]);
  a.objective_value = dot_objective(instance, a.values);
  return a;
}

void set_incumbent(SearchTree& tree, const BnbNode& node) {
  tree.incumbent = rounded_assignment(tree.instance(), *node.lp.point);
  tree.gub = tree.incumbent->objective_value;
}

// Removes open nodes that the current gub dominates.
void prune_open_by_bound(SearchTree& tree, std::size_t closed_step) {
  std::erase_if(tree.open, [&](NodeId id) {
    BnbNode& node = tree.nodes[id];
    if (!dominated(node.lp_objective(), tree.gub)) return false;
    node.status = NodeStatus::PrunedByBound;
    node.closed_at = closed_step;
    return true;
  });
}

void push_open(SearchTree& tree, NodeId id, std::size_t at_step) {
  tree.nodes[id].opened_at = at_step;
  tree.open.push_back(id);
}

}  // namespace

SearchTree init_tree(const MilpInstance& instance, NodeSelectionPolicy selection) {
  return init_tree(std::make_shared<const MilpInstance>(instance), selection);
}

SearchTree init_tree(std::shared_ptr<const MilpInstance> instance, NodeSelectionPolicy selection) {
  if (!instance) throw Error(ErrorCode::InvalidArgument, "null instance");
  require_valid(*instance);
  SearchTree tree;
  tree.root_instance = std::move(instance);
  tree.selection = selection;
  tree.pseudocosts = PseudocostTable(tree.instance().num_vars);

  BnbNode root;
  root.id = 0;
  root.lp = solve_relaxation(tree.instance());
  tree.lp_iterations += root.lp.iterations;
  if (!root.lp.optimal()) {
    // Unbounded relaxations cannot occur with bounded integers unless the
    // continuous part is unbounded; such an instance has no finite optimum.
    root.status = NodeStatus::PrunedInfeasible;
    root.closed_at = 0;
    tree.nodes.push_back(std::move(root));
  } else if (is_integral(root.lp, tree.instance())) {
    root.status = NodeStatus::PrunedIntegral;
    root.closed_at = 0;
    tree.nodes.push_back(std::move(root));
    set_incumbent(tree, tree.nodes[0]);
  } else {
    tree.nodes.push_back(std::move(root));
    push_open(tree, 0, 0);
  }
  return tree;
}

void node_bounds(const SearchTree& tree, NodeId id, std::vector<double>& lower,
                 std::vector<double>& upper) {
  lower = tree.instance().lower;
  upper = tree.instance().upper;
  for (const BoundChange& change : tree.nodes.at(id).bound_changes) {
    apply_bound_change(lower, upper, change);
  }
}

std::vector<VarIndex> fractional_candidates(const SearchTree& tree, NodeId id) {
  if (id >= tree.nodes.size()) throw Error(ErrorCode::InvalidArgument, "node id out of range");
  const BnbNode& node = tree.nodes[id];
  if (!node.lp.optimal()) {
    throw Error(ErrorCode::PreconditionViolated, "node " + std::to_string(id) + " has no LP optimum");
  }
  std::vector<VarIndex> out;
  std::vector<VarIndex> ints = tree.instance().integer_indices;
  std::sort(ints.begin(), ints.end());
  for (VarIndex j : ints) {
    if (fractionality((*node.lp.point)[j]) > kIntEps) out.push_back(j);
  }
  return out;
}

Expansion expand(SearchTree& tree, NodeId id, VarIndex var) {
  if (!tree.is_open(id)) {
    throw Error(ErrorCode::PreconditionViolated, "node " + std::to_string(id) + " is not open");
  }
  const auto cands = fractional_candidates(tree, id);
  if (!std::binary_search(cands.begin(), cands.end(), var)) {
    throw Error(ErrorCode::PreconditionViolated,
                "variable " + std::to_string(var) + " is not a fractional candidate");
  }

  const std::size_t next_step = tree.step + 1;
  const MilpInstance& inst = tree.instance();
  std::vector<double> lower, upper;
  node_bounds(tree, id, lower, upper);

  const double xhat = (*tree.nodes[id].lp.point)[var];
  const double down = std::floor(xhat);
  const double up = std::ceil(xhat);
  const double parent_obj = tree.nodes[id].lp_objective();

  std::erase(tree.open, id);
  {
    BnbNode& parent = tree.nodes[id];
    parent.status = NodeStatus::Branched;
    parent.closed_at = next_step;
    parent.branch_var = var;
  }

  const BoundChange changes[2] = {{var, BoundDirection::TightenUpper, down},
                                  {var, BoundDirection::TightenLower, up}};
  NodeId child_ids[2];
  bool keep_open[2] = {false, false};
  const double gub_before = tree.gub;

  for (int side = 0; side < 2; ++side) {
    BnbNode child;
    child.id = tree.nodes.size();
    child.parent = id;
    child.bound_changes = tree.nodes[id].bound_changes;
    child.bound_changes.push_back(changes[side]);
    child.depth = tree.nodes[id].depth + 1;
    child.created_at = next_step;

    std::vector<double> lo = lower, hi = upper;
    apply_bound_change(lo, hi, changes[side]);
    child.lp = solve_relaxation(inst, lo, hi);
    tree.lp_iterations += child.lp.iterations;

    if (child.lp.optimal()) {
      const double gain = std::max(0.0, *child.lp.objective - parent_obj);
      if (side == 0) {
        tree.pseudocosts.record_down(var, gain / (xhat - down));
      } else {
        tree.pseudocosts.record_up(var, gain / (up - xhat));
      }
    }

    if (!child.lp.optimal()) {
      child.status = NodeStatus::PrunedInfeasible;
      child.closed_at = next_step;
    } else if (dominated(*child.lp.objective, tree.gub)) {
      child.status = NodeStatus::PrunedByBound;
      child.closed_at = next_step;
    } else if (is_integral(child.lp, inst)) {
      child.status = NodeStatus::PrunedIntegral;
      child.closed_at = next_step;
      set_incumbent(tree, child);
    } else {
      keep_open[side] = true;
    }
    child_ids[side] = child.id;
    tree.nodes.push_back(std::move(child));
  }

  tree.nodes[id].child_minus = child_ids[0];
  tree.nodes[id].child_plus = child_ids[1];

  // A plus child that improved the incumbent may dominate its pending sibling.
  for (int side = 0; side < 2; ++side) {
    BnbNode& child = tree.nodes[child_ids[side]];
    if (keep_open[side] && dominated(child.lp_objective(), tree.gub)) {
      child.status = NodeStatus::PrunedByBound;
      child.closed_at = next_step;
      keep_open[side] = false;
    }
  }
  if (tree.gub < gub_before) prune_open_by_bound(tree, next_step);

  const bool plus_first_in_container =
      tree.selection.kind == SelectionKind::BFS
          ? tree.selection.dfs_child_order == ChildOrder::PlusFirst
          : tree.selection.dfs_child_order == ChildOrder::MinusFirst;
  const int order[2] = {plus_first_in_container ? 1 : 0, plus_first_in_container ? 0 : 1};
  for (int side : order) {
    if (keep_open[side]) push_open(tree, child_ids[side], next_step);
  }

  tree.step = next_step;
  return {child_ids[0], child_ids[1]};
}

NodeId select_node(SearchTree& tree) {
  if (tree.open.empty()) throw Error(ErrorCode::PreconditionViolated, "open set is empty");
  NodeId chosen = 0;
  switch (tree.selection.kind) {
    case SelectionKind::DFS:
      chosen = tree.open.back();
      break;
    case SelectionKind::BFS:
      chosen = tree.open.front();
      break;
    case SelectionKind::BestBound: {
      chosen = tree.open.front();
      for (NodeId id : tree.open) {
        const double a = tree.nodes[id].lp_objective();
        const double b = tree.nodes[chosen].lp_objective();
        if (a < b || (a == b && id < chosen)) chosen = id;
      }
      break;
    }
  }
  BnbNode& node = tree.nodes[chosen];
  node.selected_at = tree.step;
  node.incumbent_at_selection = tree.gub;
  return chosen;
}

void fill_subtree_sizes(SearchTree& tree) {
  std::vector<std::size_t> count(tree.nodes.size(), 0);
  for (const BnbNode& node : tree.nodes) {
    auto p = node.parent;
    while (p) {
      ++count[*p];
      p = tree.nodes[*p].parent;
    }
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) tree.nodes[i].subtree_nodes_added = count[i];
}

double open_dual_bound(const SearchTree& tree) {
  double best = tree.gub;
  for (NodeId id : tree.open) best = std::min(best, tree.nodes[id].lp_objective());
  return best;
}

// ---------------------------------------------------------------------------

VarIndex RandomBranching::choose(const SearchTree&, NodeId,
                                 const std::vector<VarIndex>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::PreconditionViolated, "no branching candidates");
  return candidates[rng_.below(candidates.size())];
}

VarIndex MostFractionalBranching::choose(const SearchTree& tree, NodeId node,
                                         const std::vector<VarIndex>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::PreconditionViolated, "no branching candidates");
  const auto& x = *tree.nodes[node].lp.point;
  VarIndex best = candidates.front();
  double best_frac = -1.0;
  for (VarIndex j : candidates) {
    const double f = fractionality(x[j]);
    if (f > best_frac || (f == best_frac && j < best)) {
      best = j;
      best_frac = f;
    }
  }
  return best;
}

namespace {

double child_delta(const MilpInstance& inst, std::vector<double>& lo, std::vector<double>& hi,
                   const BoundChange& change, double parent_obj) {
  const double saved_lo = lo[change.var], saved_hi = hi[change.var];
  apply_bound_change(lo, hi, change);
  const LpResult r = solve_relaxation(inst, lo, hi);
  lo[change.var] = saved_lo;
  hi[change.var] = saved_hi;
  if (!r.optimal()) return kStrongBranchBig;
  return *r.objective - parent_obj;
}

double sb_score(const SearchTree& tree, NodeId node, VarIndex var, std::vector<double>& lo,
                std::vector<double>& hi) {
  const BnbNode& n = tree.nodes[node];
  const double xhat = (*n.lp.point)[var];
  const double parent_obj = n.lp_objective();
  const double dm = child_delta(tree.instance(), lo, hi,
                                {var, BoundDirection::TightenUpper, std::floor(xhat)}, parent_obj);
  const double dp = child_delta(tree.instance(), lo, hi,
                                {var, BoundDirection::TightenLower, std::ceil(xhat)}, parent_obj);
  return std::max(dm, kStrongBranchEps) * std::max(dp, kStrongBranchEps);
}

void require_open(const SearchTree& tree, NodeId node) {
  if (!tree.is_open(node)) {
    throw Error(ErrorCode::PreconditionViolated, "node " + std::to_string(node) + " is not open");
  }
}

}  // namespace

std::map<VarIndex, double> strong_branching_scores(const SearchTree& tree, NodeId node) {
  require_open(tree, node);
  std::vector<double> lo, hi;
  node_bounds(tree, node, lo, hi);
  std::map<VarIndex, double> scores;
  for (VarIndex j : fractional_candidates(tree, node)) scores[j] = sb_score(tree, node, j, lo, hi);
  return scores;
}

double strong_branching_score(const SearchTree& tree, NodeId node, VarIndex var) {
  require_open(tree, node);
  std::vector<double> lo, hi;
  node_bounds(tree, node, lo, hi);
  return sb_score(tree, node, var, lo, hi);
}

VarIndex StrongBranching::choose(const SearchTree& tree, NodeId node,
                                 const std::vector<VarIndex>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::PreconditionViolated, "no branching candidates");
  std::vector<double> lo, hi;
  node_bounds(tree, node, lo, hi);
  VarIndex best = candidates.front();
  double best_score = -1.0;
  for (VarIndex j : candidates) {
    const double s = sb_score(tree, node, j, lo, hi);
    if (s > best_score) {
      best = j;
      best_score = s;
    }
  }
  return best;
}

VarIndex pseudocost_branch(const SearchTree& tree, NodeId node, const PseudocostTable& stats,
                           std::size_t reliability) {
  require_open(tree, node);
  const auto candidates = fractional_candidates(tree, node);
  if (candidates.empty()) throw Error(ErrorCode::PreconditionViolated, "no branching candidates");
  const auto& x = *tree.nodes[node].lp.point;
  std::vector<double> lo, hi;
  bool have_bounds = false;
  VarIndex best = candidates.front();
  double best_score = -1.0;
  for (VarIndex j : candidates) {
    double s;
    if (stats.down_count(j) < reliability || stats.up_count(j) < reliability) {
      if (!have_bounds) {
        node_bounds(tree, node, lo, hi);
        have_bounds = true;
      }
      s = sb_score(tree, node, j, lo, hi);
    } else {
      const double f = x[j] - std::floor(x[j]);
      s = std::max(stats.down_estimate(j) * f, kStrongBranchEps) *
          std::max(stats.up_estimate(j) * (1.0 - f), kStrongBranchEps);
    }
    if (s > best_score) {
      best = j;
      best_score = s;
    }
  }
  return best;
}

VarIndex PseudocostBranching::choose(const SearchTree& tree, NodeId node,
                                     const std::vector<VarIndex>& candidates) {
  (void)candidates;
  return pseudocost_branch(tree, node, tree.pseudocosts, reliability_);
}

// ---------------------------------------------------------------------------

SolveReport solve(const MilpInstance& instance, BranchingPolicy& branching,
                  NodeSelectionPolicy selection, SolveLimits limits, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  branching.reset(seed);
  SolveReport report;
  report.tree = init_tree(instance, selection);
  SearchTree& tree = report.tree;
  while (!tree.terminal() && tree.node_count() + 2 <= limits.max_nodes && tree.step < limits.max_steps) {
    const NodeId focus = select_node(tree);
    const auto candidates = fractional_candidates(tree, focus);
    expand(tree, focus, branching.choose(tree, focus, candidates));
  }
  report.status = tree.terminal() ? SolveStatus::Optimal : SolveStatus::LimitReached;
  fill_subtree_sizes(tree);
  report.incumbent = tree.incumbent;
  if (tree.incumbent) report.objective = tree.incumbent->objective_value;
  report.node_count = tree.node_count();
  report.step_count = tree.step;
  report.lp_iterations = tree.lp_iterations;
  report.dual_bound = open_dual_bound(tree);
  report.branching = branching.name();
  report.selection = to_string(selection.kind);
  report.seed = seed;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string solve_report_json(const SolveReport& report) {
  nlohmann::ordered_json j;
  j["instance"] = report.tree.root_instance ? report.tree.instance().name : "";
  if (report.objective) {
    j["objective"] = *report.objective;
  } else {
    j["objective"] = nullptr;
  }
  j["node_count"] = report.node_count;
  j["step_count"] = report.step_count;
  j["status"] = to_string(report.status);
  j["lp_iterations"] = report.lp_iterations;
  j["branching"] = report.branching;
  j["selection"] = report.selection;
  j["seed"] = report.seed;
  j["seconds"] = report.seconds;
  return j.dump();
}

}  // namespace bbmdp
