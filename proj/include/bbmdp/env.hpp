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
#include "bbmdp/features.hpp"
#include "bbmdp/instances.hpp"

namespace bbmdp {

struct EnvConfig {
  double reward_per_transition = -2.0;
  NodeSelectionPolicy selection{};
  double gamma = 1.0;
  std::size_t max_steps = 50000;

  void validate() const;
};

struct EnvTransition {
  std::size_t step = 0;  // index t of the state the action was taken in
  NodeId focus_node = 0;
  VarIndex action = 0;
  double reward = 0.0;
  std::size_t open_count = 0;  // after the transition
  double gub = kInf;           // after the transition
};

struct Episode {
  std::shared_ptr<const MilpInstance> instance;
  EnvConfig config;
  std::vector<EnvTransition> transitions;
  SearchTree final_tree;
  double total_return = 0.0;
  bool truncated = false;

  std::size_t step_count() const { return transitions.size(); }
};

/// The BBMDP: state is the whole search tree, an action is a fractional
/// variable of the focus node o1 = rho(s), and every transition costs
/// `reward_per_transition`. Non-fractional actions are rejected.
class BranchingEnv {
 public:
  explicit BranchingEnv(EnvConfig config = {});

  /// Returns done.
  bool reset(const MilpInstance& instance);
  bool reset(std::shared_ptr<const MilpInstance> instance);

  struct StepResult {
    double reward;
    bool done;
  };
  StepResult step(VarIndex action);

  bool done() const { return tree_.terminal(); }
  const SearchTree& state() const { return tree_; }
  SearchTree& mutable_state() { return tree_; }
  std::optional<NodeId> focus() const { return focus_; }
  /// Fractional candidates of the focus node (empty when done).
  const std::vector<VarIndex>& action_set() const { return actions_; }
  const EnvConfig& config() const { return config_; }

 private:
  void refocus();

  EnvConfig config_;
  SearchTree tree_;
  std::optional<NodeId> focus_;
  std::vector<VarIndex> actions_;
};

/// Runs `policy` (reset with `seed`) to termination or the step limit.
Episode rollout(const MilpInstance& instance, BranchingPolicy& policy, const EnvConfig& config,
                std::uint64_t seed);

/// JSON Lines: one object per transition, then a footer with totals.
std::string episode_trace_jsonl(const Episode& episode);

/// Nodes in the open set of state s_t, reconstructed from the final tree.
std::vector<NodeId> open_nodes_at(const SearchTree& tree, std::size_t t);

struct SubtreeRecord {
  NodeId node_id = 0;
  FeatureMatrix features;      // empty unless requested
  std::size_t action_row = 0;  // row of `action` in features.candidates
  VarIndex action = 0;
  std::size_t nodes_added_below = 0;
  std::optional<std::size_t> child_minus_record;  // index into the record list
  std::optional<std::size_t> child_plus_record;
  bool minus_fathomed = false;
  bool plus_fathomed = false;
  std::size_t selected_at = 0;
  std::size_t depth = 0;
};

/// One record per Branched node in node-id order, sizes computed bottom-up.
/// Throws Error(PreconditionViolated) for a truncated episode.
std::vector<SubtreeRecord> subtree_records(const Episode& episode, bool with_features = false);

struct TreeMdpTuple {
  NodeId node = 0;
  VarIndex action = 0;
  std::optional<NodeId> next_minus;  // nullopt: terminal (fathomed) child
  std::optional<NodeId> next_plus;
};

std::vector<TreeMdpTuple> treemdp_view(const Episode& episode);

struct ContextWitness {
  std::uint64_t instance_seed = 0;
  std::uint64_t seed_a = 0;
  std::uint64_t seed_b = 0;
  std::vector<BoundChange> node_path;
  double incumbent_at_selection = kInf;
  std::size_t size_a = 0;
  std::size_t size_b = 0;
};

struct ContextReport {
  SelectionKind selection = SelectionKind::BFS;
  std::size_t instances_searched = 0;
  std::size_t comparisons = 0;
  std::size_t witness_count = 0;
  std::optional<ContextWitness> first_witness;
};

/// For each instance seed in [seed_begin, seed_end), solves the instance twice
/// with a policy that is fixed (most fractional) at the root and inside the
/// root's plus subtree and seeded-random inside the minus subtree. Nodes of the
/// plus subtree sharing the bound path and incumbent-at-selection across the
/// two runs are compared by subtree size; a mismatch is a witness that the
/// subtree size depends on sibling branching.
ContextReport bfs_context_counterexample(std::uint64_t seed_begin, std::uint64_t seed_end,
                                         SelectionKind selection, const FamilySpec& base);

std::string context_report_json(const ContextReport& report);

}  // namespace bbmdp
