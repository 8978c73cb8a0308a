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

#include "bbmdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bbmdp/error.hpp"

namespace bbmdp {

double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "geometric mean of no values");
  double s = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "geometric mean needs positive values");
    s += std::log(v);
  }
  return std::exp(s / static_cast<double>(values.size()));
}

double shifted_geometric_mean(const std::vector<double>& values, double shift) {
  std::vector<double> shifted(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) shifted[i] = values[i] + shift;
  return geometric_mean(shifted) - shift;
}

namespace {

std::string cell_key(const EvalRow& r) { return r.instance + '\x1f' + std::to_string(r.seed); }

std::vector<std::string> policy_order(const std::vector<EvalRow>& rows) {
  std::vector<std::string> order;
  for (const EvalRow& r : rows) {
    if (std::find(order.begin(), order.end(), r.policy) == order.end()) order.push_back(r.policy);
  }
  return order;
}

}  // namespace

std::map<std::string, WinsRanks> wins_and_ranks(const std::vector<EvalRow>& rows, RankBy by) {
  std::map<std::string, std::vector<const EvalRow*>> cells;
  for (const EvalRow& r : rows) cells[cell_key(r)].push_back(&r);
  std::map<std::string, WinsRanks> out;
  std::map<std::string, std::size_t> ranked_cells;
  for (const std::string& p : policy_order(rows)) out[p] = {};
  for (auto& [key, runs] : cells) {
    std::sort(runs.begin(), runs.end(), [by](const EvalRow* a, const EvalRow* b) {
      if (a->solved != b->solved) return a->solved;
      if (a->solved) {
        const double ma = by == RankBy::Seconds ? a->seconds : static_cast<double>(a->nodes);
        const double mb = by == RankBy::Seconds ? b->seconds : static_cast<double>(b->nodes);
        if (ma != mb) return ma < mb;
      } else if (a->gap != b->gap) {
        return a->gap < b->gap;
      }
      if (a->nodes != b->nodes) return a->nodes < b->nodes;
      return a->policy < b->policy;
    });
    for (std::size_t i = 0; i < runs.size(); ++i) {
      WinsRanks& wr = out[runs[i]->policy];
      if (i == 0) ++wr.wins;
      wr.mean_rank += static_cast<double>(i + 1);
      ++ranked_cells[runs[i]->policy];
    }
  }
  for (auto& [policy, wr] : out) {
    if (ranked_cells[policy] > 0) wr.mean_rank /= static_cast<double>(ranked_cells[policy]);
  }
  return out;
}

std::map<std::string, double> normalized_score(const std::vector<EvalRow>& rows, const std::string& reference) {
  std::map<std::string, std::map<std::string, std::vector<double>>> nodes;  // family -> policy -> nodes
  bool have_reference = false;
  for (const EvalRow& r : rows) {
    nodes[r.family][r.policy].push_back(static_cast<double>(r.nodes));
    have_reference = have_reference || r.policy == reference;
  }
  if (!have_reference) throw Error(ErrorCode::InvalidArgument, "reference policy '" + reference + "' missing");
  std::map<std::string, double> sum;
  std::map<std::string, std::size_t> count;
  for (const auto& [family, per_policy] : nodes) {
    const auto ref = per_policy.find(reference);
    if (ref == per_policy.end()) continue;
    const double ref_geo = geometric_mean(ref->second);
    for (const auto& [policy, values] : per_policy) {
      sum[policy] += 100.0 * geometric_mean(values) / ref_geo;
      ++count[policy];
    }
  }
  std::map<std::string, double> out;
  for (const auto& [policy, s] : sum) out[policy] = s / static_cast<double>(count[policy]);
  return out;
}

void aggregate(EvalReport& report) {
  report.aggregates.clear();
  const auto by_nodes = wins_and_ranks(report.rows, RankBy::Nodes);
  const auto by_seconds = wins_and_ranks(report.rows, RankBy::Seconds);
  std::map<std::string, double> scores;
  if (report.reference_policy) scores = normalized_score(report.rows, *report.reference_policy);
  for (const std::string& p : policy_order(report.rows)) {
    PolicyAggregate a;
    a.policy = p;
    std::vector<double> nodes, secs;
    for (const EvalRow& r : report.rows) {
      if (r.policy != p) continue;
      nodes.push_back(static_cast<double>(r.nodes));
      // Sub-microsecond timings would make the plain geometric mean degenerate.
      secs.push_back(std::max(r.seconds, 1e-6));
      ++a.cells;
      if (r.solved) ++a.solved;
    }
    a.geomean_nodes = geometric_mean(nodes);
    a.geomean_seconds = geometric_mean(secs);
    a.wins_nodes = by_nodes.at(p).wins;
    a.mean_rank_nodes = by_nodes.at(p).mean_rank;
    a.wins_seconds = by_seconds.at(p).wins;
    a.mean_rank_seconds = by_seconds.at(p).mean_rank;
    if (const auto it = scores.find(p); it != scores.end()) a.normalized_score = it->second;
    report.aggregates.push_back(a);
  }
}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "instance,family,policy,seed,nodes,steps,solved,objective,gap,seconds\n";
  for (const EvalRow& r : report.rows) {
    out << r.instance << ',' << r.family << ',' << r.policy << ',' << r.seed << ',' << r.nodes << ','
        << r.steps << ',' << (r.solved ? 1 : 0) << ',' << (r.objective ? fmt(*r.objective) : "") << ','
        << fmt(r.gap) << ',' << fmt(r.seconds) << '\n';
  }
  return out.str();
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["cells"] = report.rows.size();
  if (report.reference_policy) {
    j["reference_policy"] = *report.reference_policy;
  } else {
    j["reference_policy"] = nullptr;
  }
  auto policies = nlohmann::ordered_json::array();
  for (const PolicyAggregate& a : report.aggregates) {
    nlohmann::ordered_json p;
    p["policy"] = a.policy;
    p["geomean_nodes"] = a.geomean_nodes;
    p["solved"] = a.solved;
    p["cells"] = a.cells;
    p["wins_nodes"] = a.wins_nodes;
    p["mean_rank_nodes"] = a.mean_rank_nodes;
    if (a.normalized_score) {
      p["normalized_score"] = *a.normalized_score;
    } else {
      p["normalized_score"] = nullptr;
    }
    p["geomean_seconds"] = a.geomean_seconds;
    p["wins_seconds"] = a.wins_seconds;
    p["mean_rank_seconds"] = a.mean_rank_seconds;
    policies.push_back(p);
  }
  j["policies"] = policies;
  return j.dump(2);
}

}  // namespace bbmdp
