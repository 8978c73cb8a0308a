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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "bbmdp/bnb.hpp"
#include "bbmdp/env.hpp"
#include "bbmdp/instances.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace bbmdp;

namespace {

const char* const kFamilies[] = {"setcover", "cauction", "knapsack", "indset"};

std::vector<std::unique_ptr<BranchingPolicy>> all_policies() {
  std::vector<std::unique_ptr<BranchingPolicy>> out;
  out.push_back(std::make_unique<RandomBranching>());
  out.push_back(std::make_unique<MostFractionalBranching>());
  out.push_back(std::make_unique<StrongBranching>());
  out.push_back(std::make_unique<PseudocostBranching>());
  return out;
}

bool in_subtree(const SearchTree& tree, NodeId node, NodeId root) {
  for (std::optional<NodeId> v = node; v; v = tree.nodes[*v].parent) {
    if (*v == root) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("domination test prunes ties") {
  CHECK(dominated(5.0, 5.0));
  CHECK(dominated(5.0 - 1e-9, 5.0));
  CHECK_FALSE(dominated(4.9, 5.0));
  CHECK_FALSE(dominated(1e9, kInf));
}

TEST_CASE("solves tiny instances to the enumerated optimum") {
  for (const char* family : kFamilies) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const MilpInstance inst = generate(preset_spec("tiny", family, seed));
      const auto ref = oracle::enumerate_optimum(inst);
      for (auto& policy : all_policies()) {
        for (SelectionKind kind : {SelectionKind::DFS, SelectionKind::BFS, SelectionKind::BestBound}) {
          const SolveReport r = solve(inst, *policy, {kind}, {}, seed);
          CAPTURE(inst.name);
          CAPTURE(policy->name());
          CAPTURE(to_string(kind));
          CHECK(r.status == SolveStatus::Optimal);
          REQUIRE(r.objective.has_value() == ref.has_value());
          if (ref) {
            CHECK(*r.objective == doctest::Approx(*ref).epsilon(1e-9));
            CHECK(oracle::feasible(inst, r.incumbent->values));
          }
          CHECK(r.node_count == 1 + 2 * r.step_count);
        }
      }
    }
  }
}

TEST_CASE("pruned-by-bound subtrees hold nothing better than the incumbent") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MilpInstance inst = generate(preset_spec("tiny", "knapsack", seed));
    RandomBranching policy;
    const SolveReport r = solve(inst, policy, {SelectionKind::BFS}, {}, seed);
    for (const BnbNode& node : r.tree.nodes) {
      if (node.status != NodeStatus::PrunedByBound) continue;
      MilpInstance sub = inst;
      for (const BoundChange& c : node.bound_changes) sub = apply_bound_change(sub, c);
      const auto best = oracle::enumerate_optimum(sub);
      if (best) CHECK(*best >= *r.objective - 1e-9);
    }
  }
}

TEST_CASE("selection rules") {
  const MilpInstance inst = generate(preset_spec("small", "knapsack", 3));
  for (SelectionKind kind : {SelectionKind::DFS, SelectionKind::BFS, SelectionKind::BestBound}) {
    RandomBranching policy;
    const SolveReport r = solve(inst, policy, {kind}, {2000, static_cast<std::size_t>(-1)}, 5);
    const SearchTree& tree = r.tree;
    std::vector<const BnbNode*> branched;
    for (const BnbNode& n : tree.nodes) {
      if (n.selected_at) branched.push_back(&n);
    }
    std::sort(branched.begin(), branched.end(),
              [](const BnbNode* a, const BnbNode* b) { return *a->selected_at < *b->selected_at; });
    REQUIRE(branched.size() > 10);
    for (const BnbNode* n : branched) {
      const std::size_t t = *n->selected_at;
      // Open set at t rebuilt from stamps.
      std::vector<const BnbNode*> open;
      for (const BnbNode& m : tree.nodes) {
        if (m.opened_at && *m.opened_at <= t && (!m.closed_at || t < *m.closed_at)) open.push_back(&m);
      }
      REQUIRE(std::find(open.begin(), open.end(), n) != open.end());
      for (const BnbNode* m : open) {
        if (kind == SelectionKind::BFS) CHECK(n->id <= m->id);
        if (kind == SelectionKind::BestBound) {
          CHECK(n->lp_objective() <= m->lp_objective());
          if (n->lp_objective() == m->lp_objective()) CHECK(n->id <= m->id);
        }
      }
    }
    if (kind == SelectionKind::DFS) {
      // Subtrees are finished before siblings are touched.
      for (const BnbNode* v : branched) {
        std::vector<std::size_t> stamps;
        for (const BnbNode* w : branched) {
          if (in_subtree(tree, w->id, v->id)) stamps.push_back(*w->selected_at);
        }
        std::sort(stamps.begin(), stamps.end());
        CHECK(stamps.back() - stamps.front() + 1 == stamps.size());
        CHECK(stamps.front() == *v->selected_at);
      }
    }
  }
}

TEST_CASE("subtree sizes add up") {
  const MilpInstance inst = generate(preset_spec("small", "indset", 1));
  RandomBranching policy;
  SolveReport r = solve(inst, policy, {SelectionKind::DFS}, {}, 9);
  fill_subtree_sizes(r.tree);
  const SearchTree& tree = r.tree;
  for (const BnbNode& n : tree.nodes) {
    REQUIRE(n.subtree_nodes_added);
    std::size_t expected = 0;
    for (const BnbNode& m : tree.nodes) {
      if (m.id != n.id && in_subtree(tree, m.id, n.id)) ++expected;
    }
    CHECK(*n.subtree_nodes_added == expected);
  }
  CHECK(*tree.nodes[0].subtree_nodes_added + 1 == r.node_count);
}

TEST_CASE("expand preconditions") {
  const MilpInstance inst = generate(preset_spec("tiny", "knapsack", 4));
  SearchTree tree = init_tree(inst);
  REQUIRE_FALSE(tree.terminal());
  const auto cands = fractional_candidates(tree, 0);
  REQUIRE_FALSE(cands.empty());
  VarIndex not_fractional = 0;
  while (std::binary_search(cands.begin(), cands.end(), not_fractional)) ++not_fractional;
  CHECK(testing::error_code_of([&] { expand(tree, 0, not_fractional); }) == ErrorCode::PreconditionViolated);
  CHECK(select_node(tree) == 0);
  const Expansion e = expand(tree, 0, cands.front());
  CHECK(e.minus == 1);
  CHECK(e.plus == 2);
  CHECK(tree.nodes[0].status == NodeStatus::Branched);
  CHECK(testing::error_code_of([&] { expand(tree, 0, cands.front()); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("strong branching scores") {
  // x0 is pinned to 1/2 by two rows, so both children are infeasible.
  MilpInstance pinned = testing::binary_instance({1, 1}, {{2, 0}, {-2, 0}}, {1, -1});
  SearchTree t1 = init_tree(pinned);
  REQUIRE(fractional_candidates(t1, 0) == std::vector<VarIndex>{0});
  CHECK(strong_branching_score(t1, 0, 0) == kStrongBranchBig * kStrongBranchBig);

  // Zero objective, sum fixed at 1.5 over three binaries: both children stay feasible at the parent's value.
  MilpInstance flat = testing::binary_instance({0, 0, 0}, {{1, 1, 1}, {-1, -1, -1}}, {1.5, -1.5});
  SearchTree t2 = init_tree(flat);
  const auto cands = fractional_candidates(t2, 0);
  REQUIRE(cands.size() == 1);
  CHECK(strong_branching_score(t2, 0, cands[0]) == doctest::Approx(kStrongBranchEps * kStrongBranchEps));

  // Scores recomputed from child LP solves.
  const MilpInstance inst = generate(preset_spec("small", "setcover", 2));
  SearchTree tree = init_tree(inst);
  REQUIRE_FALSE(tree.terminal());
  const auto scores = strong_branching_scores(tree, 0);
  const double parent = tree.nodes[0].lp_objective();
  std::vector<double> lo, hi;
  node_bounds(tree, 0, lo, hi);
  for (const auto& [j, score] : scores) {
    const double x = (*tree.nodes[0].lp.point)[j];
    auto lo_m = lo, hi_m = hi, lo_p = lo, hi_p = hi;
    hi_m[j] = std::floor(x);
    lo_p[j] = std::ceil(x);
    const LpResult m = solve_relaxation(inst, lo_m, hi_m);
    const LpResult p = solve_relaxation(inst, lo_p, hi_p);
    const double dm = m.optimal() ? std::max(*m.objective - parent, 1e-4) : 1e8;
    const double dp = p.optimal() ? std::max(*p.objective - parent, 1e-4) : 1e8;
    CHECK(score == doctest::Approx(dm * dp));
  }
  CHECK(tree.nodes.size() == 1);  // scoring leaves the tree untouched
  StrongBranching sb;
  const VarIndex pick = sb.choose(tree, 0, fractional_candidates(tree, 0));
  for (const auto& [j, score] : scores) CHECK(score <= scores.at(pick));
}

TEST_CASE("pseudocost table") {
  PseudocostTable table(3);
  CHECK(table.reliability(0) == 0);
  for (int i = 0; i < 10; ++i) {
    table.record_down(0, 1.0);
    table.record_up(0, 1.0);
  }
  CHECK(table.down_estimate(0) == 1.0);
  CHECK(table.up_estimate(0) == 1.0);
  CHECK(table.reliability(0) == 10);
  table.record_up(1, 3.0);
  CHECK(table.reliability(1) == 0);
  CHECK(table.up_estimate(1) == 3.0);
}

TEST_CASE("pseudocost falls back to strong branching without observations") {
  const MilpInstance inst = generate(preset_spec("small", "setcover", 4));
  SearchTree tree = init_tree(inst);
  REQUIRE_FALSE(tree.terminal());
  StrongBranching sb;
  const auto cands = fractional_candidates(tree, 0);
  CHECK(pseudocost_branch(tree, 0, PseudocostTable(inst.num_vars)) == sb.choose(tree, 0, cands));
}

TEST_CASE("node limit stops the search") {
  const MilpInstance inst = generate(preset_spec("small", "knapsack", 0));
  RandomBranching policy;
  const SolveReport r = solve(inst, policy, {SelectionKind::DFS}, {51, static_cast<std::size_t>(-1)}, 0);
  CHECK(r.status == SolveStatus::LimitReached);
  CHECK(r.node_count <= 51);
  CHECK(r.node_count == 1 + 2 * r.step_count);
}

TEST_CASE("solves are reproducible for a seed") {
  const MilpInstance inst = generate(preset_spec("small", "indset", 6));
  RandomBranching policy;
  const SolveReport a = solve(inst, policy, {SelectionKind::BFS}, {}, 17);
  const SolveReport b = solve(inst, policy, {SelectionKind::BFS}, {}, 17);
  CHECK(a.node_count == b.node_count);
  for (std::size_t i = 0; i < a.tree.nodes.size(); ++i) {
    CHECK(a.tree.nodes[i].branch_var == b.tree.nodes[i].branch_var);
  }
  const std::string json = solve_report_json(a);
  for (const char* key : {"\"objective\"", "\"node_count\"", "\"status\"", "\"seconds\""}) {
    CHECK(json.find(key) != std::string::npos);
  }
}
