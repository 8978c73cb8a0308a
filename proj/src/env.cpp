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

#include "bbmdp/env.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "bbmdp/error.hpp"

namespace bbmdp {

void EnvConfig::validate() const {
  if (!(reward_per_transition < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "reward_per_transition must be negative");
  }
  if (gamma != 1.0) throw Error(ErrorCode::InvalidArgument, "gamma must be 1");
  if (max_steps == 0) throw Error(ErrorCode::InvalidArgument, "max_steps must be positive");
}

BranchingEnv::BranchingEnv(EnvConfig config) : config_(config) { config_.validate(); }

bool BranchingEnv::reset(const MilpInstance& instance) {
  return reset(std::make_shared<const MilpInstance>(instance));
}

bool BranchingEnv::reset(std::shared_ptr<const MilpInstance> instance) {
  tree_ = init_tree(std::move(instance), config_.selection);
  refocus();
  return done();
}

void BranchingEnv::refocus() {
  if (tree_.terminal()) {
    focus_.reset();
    actions_.clear();
    return;
  }
  focus_ = select_node(tree_);
  actions_ = fractional_candidates(tree_, *focus_);
}

BranchingEnv::StepResult BranchingEnv::step(VarIndex action) {
  if (!focus_) throw Error(ErrorCode::PreconditionViolated, "step on a terminal state");
  if (!std::binary_search(actions_.begin(), actions_.end(), action)) {
    throw Error(ErrorCode::PreconditionViolated,
                "action " + std::to_string(action) + " is not a fractional candidate of the focus node");
  }
  expand(tree_, *focus_, action);
  refocus();
  return {config_.reward_per_transition, done()};
}

Episode rollout(const MilpInstance& instance, BranchingPolicy& policy, const EnvConfig& config,
                std::uint64_t seed) {
  policy.reset(seed);
  Episode ep;
  ep.instance = std::make_shared<const MilpInstance>(instance);
  ep.config = config;
  BranchingEnv env(config);
  bool done = env.reset(ep.instance);
  while (!done) {
    if (ep.transitions.size() >= config.max_steps) {
      ep.truncated = true;
      break;
    }
    EnvTransition tr;
    tr.step = env.state().step;
    tr.focus_node = *env.focus();
    tr.action = policy.choose(env.state(), tr.focus_node, env.action_set());
    const auto result = env.step(tr.action);
    tr.reward = result.reward;
    tr.open_count = env.state().open.size();
    tr.gub = env.state().gub;
    ep.total_return += tr.reward;
    ep.transitions.push_back(tr);
    done = result.done;
  }
  ep.final_tree = env.state();
  fill_subtree_sizes(ep.final_tree);
  return ep;
}

namespace {

nlohmann::ordered_json finite_or_sentinel(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "+inf" : "-inf";
}

}  // namespace

std::string episode_trace_jsonl(const Episode& episode) {
  std::ostringstream out;
  for (const EnvTransition& tr : episode.transitions) {
    nlohmann::ordered_json j;
    j["step"] = tr.step;
    j["focus_node"] = tr.focus_node;
    j["action"] = tr.action;
    j["reward"] = tr.reward;
    j["open_count"] = tr.open_count;
    j["gub"] = finite_or_sentinel(tr.gub);
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json footer;
  footer["total_return"] = episode.total_return;
  footer["step_count"] = episode.step_count();
  footer["node_count"] = episode.final_tree.node_count();
  footer["truncated"] = episode.truncated;
  footer["gub"] = finite_or_sentinel(episode.final_tree.gub);
  out << footer.dump() << '\n';
  return out.str();
}

std::vector<NodeId> open_nodes_at(const SearchTree& tree, std::size_t t) {
  std::vector<NodeId> out;
  for (const BnbNode& node : tree.nodes) {
    if (!node.opened_at || *node.opened_at > t) continue;
    if (node.closed_at && *node.closed_at <= t) continue;
    out.push_back(node.id);
  }
  return out;
}

std::vector<SubtreeRecord> subtree_records(const Episode& episode, bool with_features) {
  if (episode.truncated) {
    throw Error(ErrorCode::PreconditionViolated, "subtree records need a complete episode");
  }
  const SearchTree& tree = episode.final_tree;
  std::vector<std::optional<std::size_t>> record_of(tree.nodes.size());
  std::vector<SubtreeRecord> records;
  for (const BnbNode& node : tree.nodes) {
    if (node.status != NodeStatus::Branched) continue;
    record_of[node.id] = records.size();
    SubtreeRecord rec;
    rec.node_id = node.id;
    rec.action = *node.branch_var;
    rec.selected_at = *node.selected_at;
    rec.depth = node.depth;
    if (with_features) {
      rec.features = featurize_node(tree, node.id);
      const auto& c = rec.features.candidates;
      rec.action_row = static_cast<std::size_t>(std::find(c.begin(), c.end(), rec.action) - c.begin());
    }
    records.push_back(std::move(rec));
  }
  // Children always carry larger ids than their parent.
  for (std::size_t r = records.size(); r-- > 0;) {
    SubtreeRecord& rec = records[r];
    const BnbNode& node = tree.nodes[rec.node_id];
    rec.child_minus_record = record_of[*node.child_minus];
    rec.child_plus_record = record_of[*node.child_plus];
    rec.minus_fathomed = !rec.child_minus_record;
    rec.plus_fathomed = !rec.child_plus_record;
    rec.nodes_added_below = 2;
    if (rec.child_minus_record) rec.nodes_added_below += records[*rec.child_minus_record].nodes_added_below;
    if (rec.child_plus_record) rec.nodes_added_below += records[*rec.child_plus_record].nodes_added_below;
  }
  return records;
}

std::vector<TreeMdpTuple> treemdp_view(const Episode& episode) {
  const SearchTree& tree = episode.final_tree;
  std::vector<TreeMdpTuple> out;
  auto next_state = [&](NodeId child) -> std::optional<NodeId> {
    if (tree.nodes[child].status == NodeStatus::Branched) return child;
    return std::nullopt;
  };
  for (const BnbNode& node : tree.nodes) {
    if (node.status != NodeStatus::Branched) continue;
    out.push_back({node.id, *node.branch_var, next_state(*node.child_minus), next_state(*node.child_plus)});
  }
  return out;
}

namespace {

// Most fractional at the root and in the root's plus subtree, random in the
// minus subtree.
class SplitContextPolicy final : public BranchingPolicy {
 public:
  std::string name() const override { return "split-context"; }
  void reset(std::uint64_t seed) override { random_.reset(seed); }
  VarIndex choose(const SearchTree& tree, NodeId node,
                  const std::vector<VarIndex>& candidates) override {
    const auto& path = tree.nodes[node].bound_changes;
    if (!path.empty() && path.front().direction == BoundDirection::TightenUpper) {
      return random_.choose(tree, node, candidates);
    }
    return fixed_.choose(tree, node, candidates);
  }

 private:
  RandomBranching random_;
  MostFractionalBranching fixed_;
};

std::string path_key(const std::vector<BoundChange>& path) {
  std::ostringstream key;
  key.precision(17);
  for (const BoundChange& c : path) {
    key << c.var << (c.direction == BoundDirection::TightenUpper ? "<=" : ">=") << c.value << ';';
  }
  return key.str();
}

}  // namespace

ContextReport bfs_context_counterexample(std::uint64_t seed_begin, std::uint64_t seed_end,
                                         SelectionKind selection, const FamilySpec& base) {
  ContextReport report;
  report.selection = selection;
  SolveLimits limits;
  limits.max_nodes = 20001;
  for (std::uint64_t s = seed_begin; s < seed_end; ++s) {
    FamilySpec spec = base;
    spec.seed = s;
    const MilpInstance inst = generate(spec);
    ++report.instances_searched;

    SplitContextPolicy policy;
    const std::uint64_t seed_a = derive_seed(s, 1), seed_b = derive_seed(s, 2);
    const SolveReport a = solve(inst, policy, {selection}, limits, seed_a);
    const SolveReport b = solve(inst, policy, {selection}, limits, seed_b);
    if (a.status != SolveStatus::Optimal || b.status != SolveStatus::Optimal) continue;

    std::map<std::string, const BnbNode*> in_a;
    for (const BnbNode& node : a.tree.nodes) {
      if (node.status != NodeStatus::Branched || node.bound_changes.empty()) continue;
      if (node.bound_changes.front().direction != BoundDirection::TightenLower) continue;
      in_a.emplace(path_key(node.bound_changes), &node);
    }
    for (const BnbNode& node : b.tree.nodes) {
      if (node.status != NodeStatus::Branched || node.bound_changes.empty()) continue;
      const auto it = in_a.find(path_key(node.bound_changes));
      if (it == in_a.end()) continue;
      const BnbNode& other = *it->second;
      if (*other.incumbent_at_selection != *node.incumbent_at_selection) continue;
      ++report.comparisons;
      if (*other.subtree_nodes_added == *node.subtree_nodes_added) continue;
      ++report.witness_count;
      if (!report.first_witness) {
        report.first_witness = ContextWitness{s,
                                              seed_a,
                                              seed_b,
                                              node.bound_changes,
                                              *node.incumbent_at_selection,
                                              *other.subtree_nodes_added,
                                              *node.subtree_nodes_added};
      }
    }
  }
  return report;
}

std::string context_report_json(const ContextReport& report) {
  nlohmann::ordered_json j;
  j["selection"] = to_string(report.selection);
  j["instances_searched"] = report.instances_searched;
  j["comparisons"] = report.comparisons;
  j["witness_count"] = report.witness_count;
  if (report.first_witness) {
    const ContextWitness& w = *report.first_witness;
    nlohmann::ordered_json wj;
    wj["instance_seed"] = w.instance_seed;
    wj["seed_a"] = w.seed_a;
    wj["seed_b"] = w.seed_b;
    auto path = nlohmann::ordered_json::array();
    for (const BoundChange& c : w.node_path) {
      path.push_back({c.var, c.direction == BoundDirection::TightenUpper ? "<=" : ">=", c.value});
    }
    wj["node_path"] = path;
    wj["incumbent_at_selection"] = finite_or_sentinel(w.incumbent_at_selection);
    wj["subtree_size_a"] = w.size_a;
    wj["subtree_size_b"] = w.size_b;
    j["first_witness"] = wj;
  } else {
    j["first_witness"] = "none found in range";
  }
  return j.dump();
}

}  // namespace bbmdp
