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

#include "bbmdp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "bbmdp/agent.hpp"
#include "bbmdp/env.hpp"
#include "bbmdp/error.hpp"
#include "bbmdp/instances.hpp"
#include "bbmdp/lp_solver.hpp"

namespace bbmdp {

PolicyEntry parse_policy(const std::string& text) {
  PolicyEntry e;
  e.label = text;
  std::string body = text;
  if (const auto at = body.rfind('@'); at != std::string::npos) {
    e.selection.kind = parse_selection_kind(body.substr(at + 1));
    body = body.substr(0, at);
  }
  if (const auto colon = body.find(':'); colon != std::string::npos) {
    e.checkpoint = body.substr(colon + 1);
    body = body.substr(0, colon);
  }
  e.branching = body;
  static const char* known[] = {"random", "mostfrac", "sb", "pseudocost", "dqn"};
  if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return body == k; }) ==
      std::end(known)) {
    throw Error(ErrorCode::InvalidArgument, "unknown branching policy '" + body + "'");
  }
  if (body == "dqn" && e.checkpoint.empty()) {
    throw Error(ErrorCode::InvalidArgument, "dqn policy needs a checkpoint: dqn:<path>");
  }
  return e;
}

std::unique_ptr<BranchingPolicy> make_policy(const PolicyEntry& entry) {
  if (entry.branching == "random") return std::make_unique<RandomBranching>();
  if (entry.branching == "mostfrac") return std::make_unique<MostFractionalBranching>();
  if (entry.branching == "sb") return std::make_unique<StrongBranching>();
  if (entry.branching == "pseudocost") return std::make_unique<PseudocostBranching>();
  if (entry.branching == "dqn") {
    auto qfn = std::make_shared<const QFunction>(load_checkpoint(entry.checkpoint).qfn);
    return std::make_unique<QBranching>(qfn, ActMode::Greedy);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown branching policy '" + entry.branching + "'");
}

std::string family_of(const MilpInstance& instance) {
  const auto dash = instance.name.find('-');
  return dash == std::string::npos ? instance.name : instance.name.substr(0, dash);
}

EvalReport evaluate(const std::vector<PolicyEntry>& policies, const std::vector<MilpInstance>& instances,
                    const std::vector<std::uint64_t>& seeds, SolveLimits limits,
                    std::optional<std::string> reference) {
  for (const MilpInstance& inst : instances) require_valid(inst);
  EvalReport report;
  report.reference_policy = std::move(reference);
  for (const PolicyEntry& entry : policies) {
    auto policy = make_policy(entry);
    for (const MilpInstance& inst : instances) {
      for (std::uint64_t seed : seeds) {
        const SolveReport r = solve(inst, *policy, entry.selection, limits, seed);
        EvalRow row;
        row.instance = inst.name;
        row.family = family_of(inst);
        row.policy = entry.label;
        row.seed = seed;
        row.nodes = r.node_count;
        row.steps = r.step_count;
        row.solved = r.status == SolveStatus::Optimal;
        row.objective = r.objective;
        row.gap = row.solved ? 0.0 : r.tree.gub - r.dual_bound;
        row.seconds = r.seconds;
        report.rows.push_back(std::move(row));
      }
    }
  }
  aggregate(report);
  return report;
}

BruteForceResult brute_force_optimum(const MilpInstance& instance, std::size_t cap) {
  require_valid(instance);
  std::vector<VarIndex> ints = instance.integer_indices;
  std::sort(ints.begin(), ints.end());
  double space = 1.0;
  for (VarIndex j : ints) space *= instance.upper[j] - instance.lower[j] + 1.0;
  if (space > static_cast<double>(cap)) {
    throw Error(ErrorCode::CapExceeded, "integer box has " + std::to_string(space) + " points, cap is " +
                                            std::to_string(cap));
  }
  const bool pure = ints.size() == instance.num_vars;
  BruteForceResult out;
  std::vector<double> x = instance.lower;
  for (VarIndex j : ints) x[j] = std::ceil(instance.lower[j] - kDataEps);
  std::vector<double> lo = instance.lower, hi = instance.upper;

  auto consider = [&]() {
    ++out.evaluations;
    if (pure) {
      for (const Row& row : instance.rows) {
        double a = 0.0;
        for (const RowEntry& e : row.coeffs) a += e.val * x[e.col];
        if (a > row.rhs + kFeasEps * (1.0 + std::abs(row.rhs))) return;
      }
      const double obj = dot_objective(instance, x);
      if (!out.objective || obj < *out.objective) {
        out.objective = obj;
        out.point = x;
      }
      return;
    }
    for (VarIndex j : ints) lo[j] = hi[j] = x[j];
    const LpResult r = solve_relaxation(instance, lo, hi);
    if (!r.optimal()) return;
    if (!out.objective || *r.objective < *out.objective) {
      out.objective = *r.objective;
      out.point = *r.point;
    }
  };

  if (ints.empty()) {
    consider();
    return out;
  }
  for (;;) {
    consider();
    std::size_t pos = 0;
    while (pos < ints.size()) {
      const VarIndex j = ints[pos];
      if (x[j] + 1.0 <= instance.upper[j] + kDataEps) {
        x[j] += 1.0;
        break;
      }
      x[j] = std::ceil(instance.lower[j] - kDataEps);
      ++pos;
    }
    if (pos == ints.size()) break;
  }
  return out;
}

double gradient_check(const QFunction& qfn, const RowMatrix& x, const std::vector<double>& targets,
                      const std::vector<double>& weights, LossKind loss, double h) {
  const auto analytic = loss_and_gradient(qfn, x, targets, weights, loss).gradient;
  QFunction probe = qfn;
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.parameter_count(); ++i) {
    const double saved = probe.parameters()[i];
    probe.parameters()[i] = saved + h;
    const double up = loss_and_gradient(probe, x, targets, weights, loss).loss;
    probe.parameters()[i] = saved - h;
    const double down = loss_and_gradient(probe, x, targets, weights, loss).loss;
    probe.parameters()[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - fd) / denom);
  }
  return worst;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

namespace {

class CheckBuilder {
 public:
  explicit CheckBuilder(std::string name) { check_.name = std::move(name); }
  void expect(bool ok, const std::function<std::string()>& describe) {
    ++check_.cases;
    if (!ok && check_.passed) {
      check_.passed = false;
      check_.detail = describe();
    }
  }
  void note(std::string detail) {
    if (check_.passed) check_.detail = std::move(detail);
  }
  VerifyCheck done() {
    if (check_.passed && check_.detail.empty()) check_.detail = std::to_string(check_.cases) + " cases";
    return check_;
  }

 private:
  VerifyCheck check_;
};

const char* kFamilies[] = {"setcover", "cauction", "knapsack", "indset"};

std::string str(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

VerifyReport verify_identities(std::size_t scope, std::uint64_t seed) {
  const std::size_t episodes = scope ? scope : 100;
  CheckBuilder accounting("node_accounting"), ret("return_identity"), prop1("subtree_bellman_identity"),
      prefix("open_set_prefix_identity"), contiguity("dfs_contiguity"), view("treemdp_view_consistency");
  const SelectionKind kinds[] = {SelectionKind::DFS, SelectionKind::BFS, SelectionKind::BestBound};
  for (std::size_t e = 0; e < episodes; ++e) {
    const std::string family = kFamilies[e % 4];
    const MilpInstance inst = generate(preset_spec("small", family, derive_seed(seed, e)));
    for (SelectionKind kind : kinds) {
      EnvConfig cfg;
      cfg.reward_per_transition = -2.0;
      cfg.selection.kind = kind;
      cfg.max_steps = 20000;
      RandomBranching policy;
      const Episode ep = rollout(inst, policy, cfg, derive_seed(seed, 1000 + e));
      const SearchTree& tree = ep.final_tree;
      const std::size_t steps = ep.step_count();
      accounting.expect(tree.node_count() == 1 + 2 * steps, [&] {
        return inst.name + " " + to_string(kind) + ": nodes " + std::to_string(tree.node_count()) + ", steps " +
               std::to_string(steps);
      });
      ret.expect(ep.total_return == cfg.reward_per_transition * static_cast<double>(steps), [&] {
        return inst.name + ": return " + str(ep.total_return) + " for " + std::to_string(steps) + " steps";
      });
      if (kind != SelectionKind::DFS || ep.truncated) continue;

      const auto records = subtree_records(ep);
      for (const SubtreeRecord& rec : records) {
        const BnbNode& node = tree.nodes[rec.node_id];
        const std::size_t below = *node.subtree_nodes_added;
        const std::size_t kids =
            2 + *tree.nodes[*node.child_minus].subtree_nodes_added + *tree.nodes[*node.child_plus].subtree_nodes_added;
        prop1.expect(rec.nodes_added_below == below && below == kids, [&] {
          return inst.name + " node " + std::to_string(rec.node_id) + ": record " +
                 std::to_string(rec.nodes_added_below) + ", counted " + std::to_string(below) + ", children " +
                 std::to_string(kids);
        });
      }
      for (std::size_t t = 0; t <= steps; ++t) {
        std::size_t sum = 0;
        for (NodeId id : open_nodes_at(tree, t)) sum += *tree.nodes[id].subtree_nodes_added;
        prefix.expect(sum == 2 * (steps - t), [&] {
          return inst.name + " t=" + std::to_string(t) + ": open sum " + std::to_string(sum) + ", expected " +
                 std::to_string(2 * (steps - t));
        });
      }
      for (const BnbNode& node : tree.nodes) {
        if (node.status != NodeStatus::Branched) continue;
        std::vector<std::size_t> stamps;
        std::vector<NodeId> stack{node.id};
        while (!stack.empty()) {
          const BnbNode& v = tree.nodes[stack.back()];
          stack.pop_back();
          if (v.status != NodeStatus::Branched) continue;
          stamps.push_back(*v.selected_at);
          stack.push_back(*v.child_minus);
          stack.push_back(*v.child_plus);
        }
        std::sort(stamps.begin(), stamps.end());
        contiguity.expect(stamps.back() - stamps.front() + 1 == stamps.size(), [&] {
          return inst.name + " node " + std::to_string(node.id) + ": selection stamps not contiguous";
        });
      }
      const auto tuples = treemdp_view(ep);
      std::map<NodeId, std::size_t> size;
      for (auto it = tuples.rbegin(); it != tuples.rend(); ++it) {
        std::size_t s = 2;
        if (it->next_minus) s += size[*it->next_minus];
        if (it->next_plus) s += size[*it->next_plus];
        size[it->node] = s;
      }
      bool same = tuples.size() == steps && records.size() == tuples.size();
      for (const SubtreeRecord& rec : records) same = same && size[rec.node_id] == rec.nodes_added_below;
      view.expect(same, [&] { return inst.name + ": view disagrees with subtree records"; });
    }
  }
  return {"identities", {accounting.done(), ret.done(), prop1.done(), prefix.done(), contiguity.done(), view.done()}};
}

VerifyReport verify_codec() {
  const HistogramCodec codec;
  CheckBuilder norm("encode_normalization"), onehot("onehot_decode"), round("round_trip"), toy("toy_codec_mass"),
      mono("decode_monotonicity");
  for (double v : {0.0, -1e-3, -0.5, -1.0, -2.0, -3.0, -10.0, -100.0, -1000.0, -65536.0, -1e6, -1e12}) {
    const auto p = codec.encode(v);
    double s = 0.0;
    bool nonneg = true;
    for (double x : p) {
      s += x;
      nonneg = nonneg && x >= 0.0;
    }
    norm.expect(std::abs(s - 1.0) <= 1e-9 && nonneg, [&] { return "value " + str(v) + ": sum " + str(s); });
  }
  for (std::size_t i = 0; i < codec.m_bins; ++i) {
    std::vector<double> p(codec.m_bins, 0.0);
    p[i] = 1.0;
    const double d = codec.decode(p);
    onehot.expect(d == -std::exp2(codec.center(i)), [&] { return "bin " + std::to_string(i) + ": " + str(d); });
  }
  for (double v : {-2.0, -10.0, -100.0, -1000.0}) {
    const double d = codec.decode(codec.encode(v));
    const double rel = std::abs(d - v) / std::abs(v);
    round.expect(rel <= 0.25, [&] { return "value " + str(v) + ": decoded " + str(d); });
  }
  // Integer-centred toy layout: bins [0.5, 18.5], width 1.
  HistogramCodec tc;
  tc.psi_min = 0.5;
  tc.psi_max = 18.5;
  const auto p2 = tc.encode(-2.0);
  const double folded = normal_cdf(0.5 / 0.75);
  toy.expect(std::abs(p2[0] - folded) <= 1e-3, [&] { return "value -2: p0 " + str(p2[0]) + " vs " + str(folded); });
  const auto p4 = tc.encode(-4.0);
  const double interior = normal_cdf(0.5 / 0.75) - normal_cdf(-0.5 / 0.75);
  toy.expect(std::abs(p4[1] - interior) <= 1e-3,
             [&] { return "value -4: p1 " + str(p4[1]) + " vs " + str(interior); });
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(codec.m_bins);
    double s = 0.0;
    for (double& x : p) s += (x = rng.uniform());
    for (double& x : p) x /= s;
    const std::size_t i = rng.below(codec.m_bins - 1);
    std::vector<double> q = p;
    const double moved = 0.5 * q[i];
    q[i] -= moved;
    q[i + 1] += moved;
    mono.expect(moved == 0.0 || codec.decode(q) < codec.decode(p), [&] { return "shift at bin " + std::to_string(i); });
  }
  return {"codec", {norm.done(), onehot.done(), round.done(), toy.done(), mono.done()}};
}

VerifyReport verify_gradients(std::size_t scope, std::uint64_t seed) {
  const std::size_t points = scope ? scope : 10;
  struct Case {
    const char* name;
    ApproximatorKind kind;
    HeadKind head;
    LossKind loss;
  };
  const Case cases[] = {{"mse_linear", ApproximatorKind::Linear, HeadKind::Scalar, LossKind::MSE},
                        {"mse_mlp", ApproximatorKind::Mlp, HeadKind::Scalar, LossKind::MSE},
                        {"hlgauss_linear", ApproximatorKind::Linear, HeadKind::Histogram, LossKind::HLGaussCE},
                        {"hlgauss_mlp", ApproximatorKind::Mlp, HeadKind::Histogram, LossKind::HLGaussCE}};
  VerifyReport report{"gradients", {}};
  for (const Case& c : cases) {
    CheckBuilder check(std::string("gradient_") + c.name);
    double worst = 0.0;
    for (std::size_t pt = 0; pt < points; ++pt) {
      SplitMix64 rng(derive_seed(seed, pt));
      QArchitecture arch;
      arch.kind = c.kind;
      arch.head = c.head;
      arch.hidden = {16, 16};
      const QFunction q(arch, HistogramCodec{}, rng.next());
      RowMatrix x(6, static_cast<Eigen::Index>(kNumFeatures));
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
      std::vector<double> t(6), w(6);
      for (std::size_t b = 0; b < 6; ++b) {
        t[b] = -rng.uniform(1.0, 40.0);
        w[b] = rng.uniform(0.2, 1.0);
      }
      const double err = gradient_check(q, x, t, w, c.loss);
      worst = std::max(worst, err);
      check.expect(err <= 1e-4, [&] { return "point " + std::to_string(pt) + ": relative error " + str(err); });
    }
    check.note("max relative error " + str(worst));
    report.checks.push_back(check.done());
  }
  return report;
}

VerifyReport verify_oracle(std::size_t scope, std::uint64_t seed) {
  const std::size_t per_family = scope ? scope : 200;
  const char* policies[] = {"random", "mostfrac", "sb", "pseudocost"};
  const SelectionKind kinds[] = {SelectionKind::DFS, SelectionKind::BFS, SelectionKind::BestBound};
  VerifyReport report{"oracle", {}};
  for (const char* family : kFamilies) {
    CheckBuilder check(std::string("bnb_matches_enumeration_") + family);
    for (std::size_t i = 0; i < per_family; ++i) {
      const MilpInstance inst = generate(preset_spec("tiny", family, derive_seed(seed, i)));
      const BruteForceResult truth = brute_force_optimum(inst);
      for (const char* name : policies) {
        for (SelectionKind kind : kinds) {
          PolicyEntry entry = parse_policy(name);
          entry.selection.kind = kind;
          auto policy = make_policy(entry);
          const SolveReport r = solve(inst, *policy, entry.selection, {}, i);
          const bool ok = r.status == SolveStatus::Optimal && r.objective.has_value() == truth.objective.has_value() &&
                          (!truth.objective || std::abs(*r.objective - *truth.objective) <= 1e-6);
          check.expect(ok, [&] {
            return inst.name + " " + name + "@" + to_string(kind) + ": bnb " +
                   (r.objective ? str(*r.objective) : "none") + ", enumeration " +
                   (truth.objective ? str(*truth.objective) : "none");
          });
        }
      }
    }
    report.checks.push_back(check.done());
  }
  return report;
}

VerifyReport verify_divergence(std::size_t scope, std::uint64_t seed, std::size_t k) {
  const std::size_t episodes = scope ? scope : 100;
  CheckBuilder equal1("one_step_equivalence"), witness("kstep_divergence_witness");
  QArchitecture arch;
  const QFunction q(arch, HistogramCodec{}, derive_seed(seed, 99));
  TargetConfig tc;
  tc.k = 1;
  tc.reward_per_transition = -1.0;
  std::size_t transitions = 0, differing = 0, deep = 0;
  std::string first;
  for (std::size_t e = 0; e < episodes; ++e) {
    const MilpInstance inst = generate(preset_spec("small", "setcover", derive_seed(seed, e)));
    EnvConfig cfg;
    cfg.reward_per_transition = -1.0;
    cfg.max_steps = 20000;
    RandomBranching policy;
    const Episode ep = rollout(inst, policy, cfg, derive_seed(seed, 5000 + e));
    if (ep.truncated || ep.step_count() == 0) continue;
    const auto records = subtree_records(ep, true);
    const auto value = greedy_frontier_value(records, q);
    for (std::size_t r = 0; r < records.size(); ++r) {
      ++transitions;
      const double a = target_1step(records, r, value, tc);
      const double b = target_kstep(records, r, value, tc);
      const double c = target_treemdp_kstep(records, r, value, tc, 1);
      equal1.expect(a == b && b == c, [&] {
        return inst.name + " record " + std::to_string(r) + ": " + str(a) + " / " + str(b) + " / " + str(c);
      });
      TargetConfig tk = tc;
      tk.k = k;
      // Guard: a branched descendant k levels down.
      if (!treemdp_frontier(records, r, k).open.empty()) ++deep;
      const double bb = target_kstep(records, r, value, tk);
      const double tm = target_treemdp_kstep(records, r, value, tk, k);
      if (bb != tm) {
        ++differing;
        if (first.empty()) {
          first = inst.name + " record " + std::to_string(r) + " (node " + std::to_string(records[r].node_id) +
                  "): bbmdp " + str(bb) + ", treemdp " + str(tm);
        }
      }
    }
  }
  witness.expect(differing > 0 || deep == 0, [&] { return "no differing target among " + std::to_string(transitions) + " transitions"; });
  witness.note(std::to_string(differing) + " of " + std::to_string(transitions) + " transitions differ at k=" +
               std::to_string(k) + (first.empty() ? "" : "; first: " + first));
  return {"divergence", {equal1.done(), witness.done()}};
}

}  // namespace

VerifyReport verify(const std::string& suite, std::size_t scope, std::uint64_t seed, std::size_t k) {
  if (suite == "identities") return verify_identities(scope, seed);
  if (suite == "codec") return verify_codec();
  if (suite == "gradients") return verify_gradients(scope, seed);
  if (suite == "oracle") return verify_oracle(scope, seed);
  if (suite == "divergence") return verify_divergence(scope, seed, k);
  throw Error(ErrorCode::InvalidArgument, "unknown verify suite '" + suite + "'");
}

std::string verify_json(const VerifyReport& report) {
  nlohmann::ordered_json j;
  j["suite"] = report.suite;
  j["passed"] = report.passed();
  auto checks = nlohmann::ordered_json::array();
  for (const VerifyCheck& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"cases", c.cases}, {"detail", c.detail}});
  }
  j["checks"] = checks;
  return j.dump(2);
}

}  // namespace bbmdp
