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

// Independent reference implementations used as test oracles. None of these
// share code paths with the library beyond the instance types and the LP
// solver where noted.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "bbmdp/lp_solver.hpp"
#include "bbmdp/milp.hpp"

namespace oracle {

using bbmdp::MilpInstance;

inline bool feasible(const MilpInstance& inst, const std::vector<double>& x, double tol = 1e-9) {
  for (std::size_t j = 0; j < inst.num_vars; ++j) {
    if (x[j] < inst.lower[j] - tol || x[j] > inst.upper[j] + tol) return false;
  }
  for (const auto& row : inst.rows) {
    double lhs = 0.0;
    for (const auto& e : row.coeffs) lhs += e.val * x[e.col];
    if (lhs > row.rhs + tol * (1.0 + std::abs(row.rhs))) return false;
  }
  return true;
}

// Exhaustive optimum of a pure-integer instance with finite bounds.
inline std::optional<double> enumerate_optimum(const MilpInstance& inst) {
  const std::size_t n = inst.num_vars;
  std::vector<double> x(inst.lower);
  std::optional<double> best;
  while (true) {
    if (feasible(inst, x)) {
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += inst.objective[j] * x[j];
      if (!best || obj < *best) best = obj;
    }
    std::size_t j = 0;
    while (j < n && x[j] + 1.0 > inst.upper[j] + 1e-9) {
      x[j] = inst.lower[j];
      ++j;
    }
    if (j == n) break;
    x[j] += 1.0;
  }
  return best;
}

// LP optimum by enumerating every basis: each vertex of {Ax <= b, l <= x <= u}
// is the solution of n linearly independent active constraints.
inline std::optional<double> vertex_optimum(const MilpInstance& inst) {
  const std::size_t n = inst.num_vars;
  std::vector<std::vector<double>> a;  // constraint rows as dense vectors
  std::vector<double> b;
  for (const auto& row : inst.rows) {
    std::vector<double> dense(n, 0.0);
    for (const auto& e : row.coeffs) dense[e.col] += e.val;
    a.push_back(dense);
    b.push_back(row.rhs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    a.push_back(e);
    b.push_back(inst.upper[j]);
    e[j] = -1.0;
    a.push_back(e);
    b.push_back(-inst.lower[j]);
  }
  const std::size_t m = a.size();
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    Eigen::MatrixXd m_a(n, n);
    Eigen::VectorXd v_b(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) m_a(r, c) = a[pick[r]][c];
      v_b(r) = b[pick[r]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m_a);
    if (lu.isInvertible()) {
      Eigen::VectorXd sol = lu.solve(v_b);
      std::vector<double> x(sol.data(), sol.data() + n);
      if (feasible(inst, x, 1e-8)) {
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += inst.objective[j] * x[j];
        if (!best || obj < *best) best = obj;
      }
    }
    // next n-combination of m
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == m - n + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Histogram probabilities by integrating a Gaussian over each bin, with the
// tails assigned to the outer bins.
inline std::vector<double> gaussian_histogram(double mu, double sigma, double lo, double hi, std::size_t m) {
  std::vector<double> p(m);
  const double w = (hi - lo) / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = i == 0 ? -std::numeric_limits<double>::infinity() : lo + w * static_cast<double>(i);
    const double b = i + 1 == m ? std::numeric_limits<double>::infinity() : lo + w * static_cast<double>(i + 1);
    const double ca = std::isinf(a) ? 0.0 : normal_cdf((a - mu) / sigma);
    const double cb = std::isinf(b) ? 1.0 : normal_cdf((b - mu) / sigma);
    p[i] = cb - ca;
  }
  return p;
}

// Exact minimum number of nodes added below a node under depth-first search
// with minus-first child order, eager fathoming and ties pruned. The state is
// the node's bounds plus the incumbent value when it is selected; the
// incumbent after a finished subtree does not depend on how it was searched.
class DfsTreeDp {
 public:
  explicit DfsTreeDp(const MilpInstance& inst, std::size_t state_cap = 200000)
      : inst_(inst), cap_(state_cap) {}

  struct Result {
    std::size_t added = 0;  // nodes added below, both children per expansion
    double gub_after = std::numeric_limits<double>::infinity();
  };

  // nullopt when the state cap is exceeded.
  std::optional<Result> solve(const std::vector<double>& lo, const std::vector<double>& hi, double gub) {
    overflow_ = false;
    Result r = value(lo, hi, gub);
    if (overflow_) return std::nullopt;
    return r;
  }

  struct State {
    std::vector<double> lo, hi;
    double gub = std::numeric_limits<double>::infinity();
  };

  // Children of branching on j that get selected, in the order they are
  // searched, each with the incumbent value it sees when selected.
  struct Split {
    std::vector<State> open;
    double gub_leaves = std::numeric_limits<double>::infinity();  // after fathoming at creation
  };

  std::vector<std::size_t> candidates(const std::vector<double>& lo, const std::vector<double>& hi) const {
    return fractional(bbmdp::solve_relaxation(inst_, lo, hi));
  }

  Split split(const State& s, std::size_t j) {
    const auto lp = bbmdp::solve_relaxation(inst_, s.lo, s.hi);
    const double xj = (*lp.point)[j];
    State m{s.lo, s.hi, s.gub}, p{s.lo, s.hi, s.gub};
    m.hi[j] = std::floor(xj);
    p.lo[j] = std::ceil(xj);
    const auto lp_m = bbmdp::solve_relaxation(inst_, m.lo, m.hi);
    const auto lp_p = bbmdp::solve_relaxation(inst_, p.lo, p.hi);

    double g = s.gub;
    bool open_m = false, open_p = false;
    for (int side = 0; side < 2; ++side) {
      const auto& c = side == 0 ? lp_m : lp_p;
      bool& open = side == 0 ? open_m : open_p;
      if (!c.optimal() || dominated(*c.objective, g)) continue;
      if (fractional(c).empty()) {
        g = std::min(g, rounded_objective(c));
        continue;
      }
      open = true;
    }
    // A sibling created before an integral child may be dominated by it.
    if (open_m && dominated(*lp_m.objective, g)) open_m = false;
    if (open_p && dominated(*lp_p.objective, g)) open_p = false;

    Split out;
    out.gub_leaves = g;
    if (open_m) {
      m.gub = g;
      out.open.push_back(m);
      g = value(m.lo, m.hi, g).gub_after;
    }
    if (open_p && !dominated(*lp_p.objective, g)) {
      p.gub = g;
      out.open.push_back(p);
    }
    return out;
  }

  // Added nodes for each fractional candidate at the given state.
  std::map<std::size_t, std::size_t> action_values(const std::vector<double>& lo,
                                                   const std::vector<double>& hi, double gub) {
    std::map<std::size_t, std::size_t> out;
    for (std::size_t j : candidates(lo, hi)) out[j] = branch(State{lo, hi, gub}, j).added;
    return out;
  }

  std::size_t states() const { return memo_.size(); }

 private:
  static bool dominated(double obj, double gub) {
    return obj >= gub - 1e-7 * (1.0 + std::abs(gub));
  }

  std::vector<std::size_t> fractional(const bbmdp::LpResult& lp) const {
    std::vector<std::size_t> out;
    if (!lp.optimal()) return out;
    for (std::size_t j : inst_.integer_indices) {
      const double v = (*lp.point)[j];
      if (std::abs(v - std::round(v)) > bbmdp::kIntEps) out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  double rounded_objective(const bbmdp::LpResult& lp) const {
    std::vector<double> x = *lp.point;
    for (std::size_t j : inst_.integer_indices) x[j] = std::round(x[j]);
    double obj = 0.0;
    for (std::size_t j = 0; j < inst_.num_vars; ++j) obj += inst_.objective[j] * x[j];
    return obj;
  }

  Result branch(const State& s, std::size_t j) {
    const Split sp = split(s, j);
    Result r;
    r.added = 2;
    r.gub_after = sp.gub_leaves;
    for (const State& c : sp.open) {
      const Result sub = value(c.lo, c.hi, c.gub);
      r.added += sub.added;
      r.gub_after = sub.gub_after;
    }
    return r;
  }

  Result value(const std::vector<double>& lo, const std::vector<double>& hi, double gub) {
    auto key = std::make_tuple(lo, hi, gub);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= cap_) {
      overflow_ = true;
      return {};
    }
    Result best;
    best.added = std::numeric_limits<std::size_t>::max();
    for (std::size_t j : candidates(lo, hi)) {
      const Result r = branch(State{lo, hi, gub}, j);
      if (r.added < best.added) best = r;
    }
    memo_.emplace(std::move(key), best);
    return best;
  }

  const MilpInstance& inst_;
  std::size_t cap_;
  bool overflow_ = false;
  std::map<std::tuple<std::vector<double>, std::vector<double>, double>, Result> memo_;
};

}  // namespace oracle
