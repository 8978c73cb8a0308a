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

#include "bbmdp/instances.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bbmdp/error.hpp"
#include "bbmdp/rng.hpp"

namespace bbmdp {

namespace {

constexpr std::size_t kResampleLimit = 1000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

MilpInstance binary_instance(std::string name, std::size_t n) {
  MilpInstance inst;
  inst.name = std::move(name);
  inst.num_vars = n;
  inst.objective.assign(n, 0.0);
  inst.lower.assign(n, 0.0);
  inst.upper.assign(n, 1.0);
  inst.integer_indices.resize(n);
  for (std::size_t j = 0; j < n; ++j) inst.integer_indices[j] = j;
  return inst;
}

std::string suffix(std::uint64_t seed) { return "-s" + std::to_string(seed); }

// Uniform sample of k distinct values from [0, n), returned sorted.
std::vector<std::size_t> sample_distinct(SplitMix64& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t pick = i + rng.below(n - i);
    std::swap(pool[i], pool[pick]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

MilpInstance set_cover(const SetCoverSpec& p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  MilpInstance inst = binary_instance(
      "setcover-" + std::to_string(p.rows) + "x" + std::to_string(p.cols) + suffix(seed), p.cols);
  for (std::size_t i = 0; i < p.rows; ++i) {
    Row row;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == kResampleLimit) {
        throw Error(ErrorCode::ResampleLimit,
                    "set cover row " + std::to_string(i) + " never reached two columns");
      }
      row.coeffs.clear();
      for (std::size_t j = 0; j < p.cols; ++j) {
        if (rng.bernoulli(p.density)) row.coeffs.push_back({j, -1.0});
      }
      if (row.coeffs.size() >= 2) break;
    }
    row.rhs = -1.0;
    inst.rows.push_back(std::move(row));
  }
  // Unit costs: with wide cost ranges the 40x80 relaxation is almost always integral.
  for (std::size_t j = 0; j < p.cols; ++j) inst.objective[j] = 1.0;
  return inst;
}

MilpInstance comb_auction(const CombAuctionSpec& p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  MilpInstance inst = binary_instance(
      "cauction-" + std::to_string(p.items) + "x" + std::to_string(p.bids) + suffix(seed), p.bids);
  std::vector<double> item_value(p.items);
  for (double& v : item_value) v = static_cast<double>(rng.between(1, 100));

  const std::size_t max_bundle = std::min<std::size_t>(p.items, 4);
  std::vector<std::vector<std::size_t>> bidders_of(p.items);
  for (std::size_t b = 0; b < p.bids; ++b) {
    std::size_t k = 1;
    while (k < max_bundle && rng.bernoulli(0.5)) ++k;
    const auto bundle = sample_distinct(rng, p.items, k);
    double base = 0.0;
    for (std::size_t i : bundle) {
      base += item_value[i];
      bidders_of[i].push_back(b);
    }
    // Complementarity bonus grows with bundle size.
    const double bonus = 0.2 * static_cast<double>(k - 1) * base;
    const double noise = static_cast<double>(rng.between(0, 10));
    inst.objective[b] = -std::floor(base + bonus + noise);
  }
  for (std::size_t i = 0; i < p.items; ++i) {
    if (bidders_of[i].size() < 2) continue;
    Row row;
    for (std::size_t b : bidders_of[i]) row.coeffs.push_back({b, 1.0});
    row.rhs = 1.0;
    inst.rows.push_back(std::move(row));
  }
  return inst;
}

MilpInstance multi_knapsack(const MultiKnapsackSpec& p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  MilpInstance inst = binary_instance(
      "knapsack-" + std::to_string(p.items) + "x" + std::to_string(p.knapsacks) + suffix(seed),
      p.items);
  std::vector<double> weight_sum(p.items, 0.0);
  for (std::size_t k = 0; k < p.knapsacks; ++k) {
    Row row;
    double total = 0.0;
    for (std::size_t j = 0; j < p.items; ++j) {
      const double w = static_cast<double>(rng.between(1, 100));
      row.coeffs.push_back({j, w});
      total += w;
      weight_sum[j] += w;
    }
    row.rhs = std::floor(0.5 * total);
    inst.rows.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < p.items; ++j) {
    const double mean_w = weight_sum[j] / static_cast<double>(p.knapsacks);
    inst.objective[j] = -(std::round(mean_w) + static_cast<double>(rng.between(1, 10)));
  }
  return inst;
}

MilpInstance max_indep_set(const MaxIndepSetSpec& p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  MilpInstance inst = binary_instance(
      "indset-" + std::to_string(p.nodes) + "a" + std::to_string(p.affinity) + suffix(seed), p.nodes);
  for (double& c : inst.objective) c = -1.0;

  // Barabasi-Albert: a clique on the first affinity+1 nodes, then each new
  // node attaches to `affinity` distinct earlier nodes chosen by degree.
  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> degree(p.nodes, 0);
  const std::size_t seed_nodes = std::min(p.nodes, p.affinity + 1);
  for (std::size_t u = 0; u < seed_nodes; ++u) {
    for (std::size_t v = u + 1; v < seed_nodes; ++v) {
      edges.insert({u, v});
      ++degree[u];
      ++degree[v];
    }
  }
  for (std::size_t v = seed_nodes; v < p.nodes; ++v) {
    std::set<std::size_t> targets;
    std::size_t total = 0;
    for (std::size_t u = 0; u < v; ++u) total += degree[u];
    for (std::size_t attempt = 0; targets.size() < p.affinity; ++attempt) {
      if (attempt == kResampleLimit * p.affinity) {
        throw Error(ErrorCode::ResampleLimit, "preferential attachment stalled");
      }
      std::uint64_t r = rng.below(total);
      std::size_t u = 0;
      while (r >= degree[u]) r -= degree[u++];
      targets.insert(u);
    }
    for (std::size_t u : targets) {
      edges.insert({u, v});
      ++degree[u];
      ++degree[v];
    }
  }
  for (const auto& [u, v] : edges) {
    Row row;
    row.coeffs = {{u, 1.0}, {v, 1.0}};
    row.rhs = 1.0;
    inst.rows.push_back(std::move(row));
  }
  return inst;
}

}  // namespace

std::string family_name(const FamilySpec& spec) {
  return std::visit(Overloaded{[](const SetCoverSpec&) { return std::string("setcover"); },
                               [](const CombAuctionSpec&) { return std::string("cauction"); },
                               [](const MultiKnapsackSpec&) { return std::string("knapsack"); },
                               [](const MaxIndepSetSpec&) { return std::string("indset"); }},
                    spec.params);
}

void validate_spec(const FamilySpec& spec) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
  };
  std::visit(Overloaded{[&](const SetCoverSpec& p) {
                          need(p.rows >= 1 && p.cols >= 1, "set cover counts must be >= 1");
                          need(p.density > 0.0 && p.density <= 1.0, "density must lie in (0, 1]");
                        },
                        [&](const CombAuctionSpec& p) {
                          need(p.items >= 1 && p.bids >= 1, "auction counts must be >= 1");
                        },
                        [&](const MultiKnapsackSpec& p) {
                          need(p.items >= 1 && p.knapsacks >= 1, "knapsack counts must be >= 1");
                        },
                        [&](const MaxIndepSetSpec& p) {
                          need(p.nodes >= 1 && p.affinity >= 1, "graph counts must be >= 1");
                        }},
             spec.params);
}

MilpInstance generate(const FamilySpec& spec) {
  validate_spec(spec);
  MilpInstance inst = std::visit(
      Overloaded{[&](const SetCoverSpec& p) { return set_cover(p, spec.seed); },
                 [&](const CombAuctionSpec& p) { return comb_auction(p, spec.seed); },
                 [&](const MultiKnapsackSpec& p) { return multi_knapsack(p, spec.seed); },
                 [&](const MaxIndepSetSpec& p) { return max_indep_set(p, spec.seed); }},
      spec.params);
  require_valid(inst);
  return inst;
}

std::map<std::string, std::map<std::string, FamilySpec>> desk_presets() {
  std::map<std::string, std::map<std::string, FamilySpec>> out;
  out["tiny"] = {{"setcover", {SetCoverSpec{10, 12, 0.3}, 0}},
                 {"cauction", {CombAuctionSpec{6, 12}, 0}},
                 {"knapsack", {MultiKnapsackSpec{12, 2}, 0}},
                 {"indset", {MaxIndepSetSpec{12, 2}, 0}}};
  out["small"] = {{"setcover", {SetCoverSpec{40, 80, 0.12}, 0}},
                  {"cauction", {CombAuctionSpec{20, 80}, 0}},
                  {"knapsack", {MultiKnapsackSpec{20, 3}, 0}},
                  {"indset", {MaxIndepSetSpec{60, 4}, 0}}};
  out["paper-shape"] = {{"setcover", {SetCoverSpec{500, 1000, 0.05}, 0}},
                        {"cauction", {CombAuctionSpec{100, 500}, 0}},
                        {"knapsack", {MultiKnapsackSpec{100, 6}, 0}},
                        {"indset", {MaxIndepSetSpec{500, 4}, 0}}};
  return out;
}

FamilySpec preset_spec(const std::string& preset, const std::string& family, std::uint64_t seed) {
  const auto presets = desk_presets();
  const auto p = presets.find(preset);
  if (p == presets.end()) throw Error(ErrorCode::InvalidArgument, "unknown preset '" + preset + "'");
  const auto f = p->second.find(family);
  if (f == p->second.end()) throw Error(ErrorCode::InvalidArgument, "unknown family '" + family + "'");
  FamilySpec spec = f->second;
  spec.seed = seed;
  return spec;
}

std::string spec_to_json(const FamilySpec& spec) {
  nlohmann::ordered_json j;
  j["family"] = family_name(spec);
  std::visit(Overloaded{[&](const SetCoverSpec& p) {
                          j["rows"] = p.rows;
                          j["cols"] = p.cols;
                          j["density"] = p.density;
                        },
                        [&](const CombAuctionSpec& p) {
                          j["items"] = p.items;
                          j["bids"] = p.bids;
                        },
                        [&](const MultiKnapsackSpec& p) {
                          j["items"] = p.items;
                          j["knapsacks"] = p.knapsacks;
                        },
                        [&](const MaxIndepSetSpec& p) {
                          j["nodes"] = p.nodes;
                          j["affinity"] = p.affinity;
                        }},
             spec.params);
  j["seed"] = spec.seed;
  return j.dump();
}

FamilySpec spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  try {
    const std::string family = j.at("family").get<std::string>();
    FamilySpec spec;
    spec.seed = j.value("seed", std::uint64_t{0});
    if (family == "setcover") {
      SetCoverSpec p;
      p.rows = j.value("rows", p.rows);
      p.cols = j.value("cols", p.cols);
      p.density = j.value("density", p.density);
      spec.params = p;
    } else if (family == "cauction") {
      CombAuctionSpec p;
      p.items = j.value("items", p.items);
      p.bids = j.value("bids", p.bids);
      spec.params = p;
    } else if (family == "knapsack") {
      MultiKnapsackSpec p;
      p.items = j.value("items", p.items);
      p.knapsacks = j.value("knapsacks", p.knapsacks);
      spec.params = p;
    } else if (family == "indset") {
      MaxIndepSetSpec p;
      p.nodes = j.value("nodes", p.nodes);
      p.affinity = j.value("affinity", p.affinity);
      spec.params = p;
    } else {
      throw Error(ErrorCode::SchemaViolation, "unknown family '" + family + "'");
    }
    validate_spec(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, e.what());
  }
}

}  // namespace bbmdp
