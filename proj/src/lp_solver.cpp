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

#include "bbmdp/lp_solver.hpp"

#include <algorithm>
#include <cmath>

#include "bbmdp/error.hpp"

namespace bbmdp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

double fractionality(double x) { return std::abs(x - std::round(x)); }

bool is_integral(const LpResult& result, const MilpInstance& instance, double eps) {
  if (!result.optimal() || !result.point)
    throw Error(ErrorCode::PreconditionViolated, "is_integral called on a non-optimal LP result");
  for (VarIndex j : instance.integer_indices)
    if (fractionality((*result.point)[j]) > eps) return false;
  return true;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kOptTol = 1e-9;

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

// Dense tableau T = B^{-1} [A | I | -E], one row per constraint. Columns are
// structurals [0,n), slacks [n, n+m), then one artificial per infeasible row.
class DenseSimplex {
 public:
  DenseSimplex(const MilpInstance& inst, std::span<const double> lower, std::span<const double> upper)
      : inst_(inst), n_(inst.num_vars), m_(inst.rows.size()) {
    setup(lower, upper);
  }

  LpResult run() {
    LpResult res;
    // Phase 1 only when some row started infeasible.
    if (num_art_ > 0) {
      std::vector<double> cost(cols_, 0.0);
      for (std::size_t k = 0; k < num_art_; ++k) cost[n_ + m_ + k] = 1.0;
      const Outcome o = iterate(cost);
      if (o == Outcome::Unbounded)
        throw Error(ErrorCode::NumericFailure, "phase 1 reported an unbounded ray");
      double infeas = 0.0;
      for (std::size_t k = 0; k < num_art_; ++k) infeas += x_[n_ + m_ + k];
      if (infeas > kFeasEps * (1.0 + rhs_scale_)) {
        res.status = LpStatus::Infeasible;
        res.iterations = iters_;
        return res;
      }
      drive_out_artificials();
    }

    const Outcome o = iterate(phase2_cost());
    res.iterations = iters_;
    if (o == Outcome::Unbounded) {
      res.status = LpStatus::Unbounded;
      return res;
    }
    refine_basic_values();
    std::vector<double> point(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    for (std::size_t j = 0; j < n_; ++j) point[j] = std::clamp(point[j], lo_[j], up_[j]);
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += inst_.objective[j] * point[j];
    res.status = LpStatus::Optimal;
    res.point = std::move(point);
    res.objective = obj;
    return res;
  }

 private:
  enum class Outcome { Optimal, Unbounded };

  double& T(std::size_t i, std::size_t j) { return tab_[i * cols_ + j]; }
  double T(std::size_t i, std::size_t j) const { return tab_[i * cols_ + j]; }

  void setup(std::span<const double> lower, std::span<const double> upper) {
    dense_.assign(m_ * n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (const auto& e : inst_.rows[i].coeffs) dense_[i * n_ + e.col] += e.val;
      rhs_scale_ = std::max(rhs_scale_, std::abs(inst_.rows[i].rhs));
    }

    std::vector<double> activity(m_, 0.0);
    lo_.assign(lower.begin(), lower.end());
    up_.assign(upper.begin(), upper.end());
    x_.assign(n_, 0.0);
    state_.assign(n_, VarState::AtLower);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        state_[j] = VarState::AtLower;
      } else if (std::isfinite(up_[j])) {
        x_[j] = up_[j];
        state_[j] = VarState::AtUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = VarState::FreeZero;
      }
    }
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) activity[i] += dense_[i * n_ + j] * x_[j];

    std::vector<std::size_t> art_rows;
    for (std::size_t i = 0; i < m_; ++i)
      if (inst_.rows[i].rhs - activity[i] < 0.0) art_rows.push_back(i);
    num_art_ = art_rows.size();
    art_rows_ = art_rows;
    cols_ = n_ + m_ + num_art_;

    // Slacks: [0, inf).
    for (std::size_t i = 0; i < m_; ++i) {
      lo_.push_back(0.0);
      up_.push_back(kInf);
      x_.push_back(0.0);
      state_.push_back(VarState::AtLower);
    }
    for (std::size_t k = 0; k < num_art_; ++k) {
      lo_.push_back(0.0);
      up_.push_back(kInf);
      x_.push_back(0.0);
      state_.push_back(VarState::AtLower);
    }

    tab_.assign(m_ * cols_, 0.0);
    basis_.assign(m_, 0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double slack = inst_.rows[i].rhs - activity[i];
      const bool needs_art = k < num_art_ && art_rows[k] == i;
      const double sign = needs_art ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) T(i, j) = sign * dense_[i * n_ + j];
      T(i, n_ + i) = sign;
      if (needs_art) {
        const std::size_t a = n_ + m_ + k;
        T(i, a) = 1.0;
        basis_[i] = a;
        state_[a] = VarState::Basic;
        x_[a] = -slack;
        ++k;
      } else {
        basis_[i] = n_ + i;
        state_[n_ + i] = VarState::Basic;
        x_[n_ + i] = slack;
      }
    }
    max_iters_ = 50 * (n_ + m_);
    bland_after_ = 3 * (n_ + m_);
  }

  std::vector<double> phase2_cost() const {
    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = inst_.objective[j];
    return cost;
  }

  bool fixed(std::size_t j) const { return lo_[j] == up_[j]; }

  // Primal simplex iterations against `cost` from the current basis.
  Outcome iterate(const std::vector<double>& cost) {
    std::vector<double> d(cost);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) d[j] -= cb * T(i, j);
    }

    while (true) {
      const bool bland = iters_ >= bland_after_;
      std::size_t q = cols_;
      double best = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (state_[j] == VarState::Basic || fixed(j)) continue;
        double gain = 0.0;
        switch (state_[j]) {
          case VarState::AtLower: gain = d[j] < -kOptTol ? -d[j] : 0.0; break;
          case VarState::AtUpper: gain = d[j] > kOptTol ? d[j] : 0.0; break;
          case VarState::FreeZero: gain = std::abs(d[j]) > kOptTol ? std::abs(d[j]) : 0.0; break;
          case VarState::Basic: break;
        }
        if (gain <= 0.0) continue;
        if (bland) {
          q = j;
          break;
        }
        if (gain > best) {
          best = gain;
          q = j;
        }
      }
      if (q == cols_) return Outcome::Optimal;

      if (iters_ >= max_iters_)
        throw Error(ErrorCode::LpIterationLimit,
                    "simplex exceeded " + std::to_string(max_iters_) + " iterations");
      ++iters_;

      const double dir = d[q] < 0.0 ? 1.0 : -1.0;
      // Ratio test.
      double step = kInf;
      std::size_t leave_row = m_;
      bool leave_to_upper = false;
      double leave_alpha = 0.0;
      if (std::isfinite(lo_[q]) && std::isfinite(up_[q])) step = up_[q] - lo_[q];
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = dir * T(i, q);
        const std::size_t b = basis_[i];
        double ratio;
        bool to_upper;
        if (alpha > kPivotTol && std::isfinite(lo_[b])) {
          ratio = std::max(0.0, (x_[b] - lo_[b]) / alpha);
          to_upper = false;
        } else if (alpha < -kPivotTol && std::isfinite(up_[b])) {
          ratio = std::max(0.0, (up_[b] - x_[b]) / -alpha);
          to_upper = true;
        } else {
          continue;
        }
        bool take = false;
        if (ratio < step - 1e-12) {
          take = true;
        } else if (ratio <= step + 1e-12 && leave_row < m_) {
          take = bland ? basis_[i] < basis_[leave_row] : std::abs(alpha) > std::abs(leave_alpha);
        } else if (ratio <= step + 1e-12 && leave_row == m_) {
          take = ratio < step;
        }
        if (take) {
          step = ratio;
          leave_row = i;
          leave_to_upper = to_upper;
          leave_alpha = alpha;
        }
      }
      if (!std::isfinite(step)) return Outcome::Unbounded;

      for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= dir * step * T(i, q);
      x_[q] += dir * step;

      if (leave_row == m_) {
        // Bound flip of the entering variable.
        if (dir > 0) {
          x_[q] = up_[q];
          state_[q] = VarState::AtUpper;
        } else {
          x_[q] = lo_[q];
          state_[q] = VarState::AtLower;
        }
        continue;
      }

      const std::size_t leaving = basis_[leave_row];
      x_[leaving] = leave_to_upper ? up_[leaving] : lo_[leaving];
      state_[leaving] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
      pivot(leave_row, q, d);
      basis_[leave_row] = q;
      state_[q] = VarState::Basic;
    }
  }

  void pivot(std::size_t r, std::size_t q, std::vector<double>& d) {
    double* prow = &tab_[r * cols_];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tab_[i * cols_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double f = d[q];
    if (f != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) d[j] -= f * prow[j];
      d[q] = 0.0;
    }
  }

  // After Phase 1: pivot basic artificials out where possible, then fix every
  // artificial at zero.
  void drive_out_artificials() {
    std::vector<double> dummy(cols_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      if (b < n_ + m_) continue;
      std::size_t best_j = cols_;
      double best = 1e-7;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        if (std::abs(T(i, j)) > best) {
          best = std::abs(T(i, j));
          best_j = j;
        }
      }
      if (best_j == cols_) continue;  // redundant row
      x_[b] = 0.0;
      state_[b] = VarState::AtLower;
      pivot(i, best_j, dummy);
      basis_[i] = best_j;
      state_[best_j] = VarState::Basic;
    }
    for (std::size_t k = 0; k < num_art_; ++k) {
      const std::size_t a = n_ + m_ + k;
      up_[a] = 0.0;
      if (state_[a] != VarState::Basic) x_[a] = 0.0;
    }
  }

  // Recomputes the basic values from the original data by solving
  // B x_B = b - N x_N with partial-pivoting Gaussian elimination.
  void refine_basic_values() {
    if (m_ == 0) return;
    std::vector<double> B(m_ * m_, 0.0), rhs(m_);
    auto column = [&](std::size_t var, std::size_t row) -> double {
      if (var < n_) return dense_[row * n_ + var];
      if (var < n_ + m_) return var - n_ == row ? 1.0 : 0.0;
      return art_rows_[var - n_ - m_] == row ? -1.0 : 0.0;
    };
    for (std::size_t i = 0; i < m_; ++i) {
      double r = inst_.rows[i].rhs;
      for (std::size_t j = 0; j < n_ + m_; ++j)
        if (state_[j] != VarState::Basic && x_[j] != 0.0) r -= column(j, i) * x_[j];
      rhs[i] = r;
      for (std::size_t k = 0; k < m_; ++k) B[i * m_ + k] = column(basis_[k], i);
    }

    std::vector<std::size_t> perm(m_);
    for (std::size_t i = 0; i < m_; ++i) perm[i] = i;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t p = c;
      for (std::size_t i = c + 1; i < m_; ++i)
        if (std::abs(B[i * m_ + c]) > std::abs(B[p * m_ + c])) p = i;
      if (std::abs(B[p * m_ + c]) < 1e-12) return;  // keep incremental values
      if (p != c) {
        for (std::size_t k = 0; k < m_; ++k) std::swap(B[p * m_ + k], B[c * m_ + k]);
        std::swap(rhs[p], rhs[c]);
      }
      for (std::size_t i = c + 1; i < m_; ++i) {
        const double f = B[i * m_ + c] / B[c * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = c; k < m_; ++k) B[i * m_ + k] -= f * B[c * m_ + k];
        rhs[i] -= f * rhs[c];
      }
    }
    std::vector<double> sol(m_);
    for (std::size_t c = m_; c-- > 0;) {
      double s = rhs[c];
      for (std::size_t k = c + 1; k < m_; ++k) s -= B[c * m_ + k] * sol[k];
      sol[c] = s / B[c * m_ + c];
    }
    for (std::size_t k = 0; k < m_; ++k) x_[basis_[k]] = sol[k];
  }

  const MilpInstance& inst_;
  std::size_t n_, m_;
  std::size_t num_art_ = 0;
  std::size_t cols_ = 0;
  double rhs_scale_ = 0.0;
  std::vector<double> dense_;
  std::vector<double> tab_;
  std::vector<double> lo_, up_, x_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> art_rows_;
  std::size_t iters_ = 0;
  std::size_t max_iters_ = 0;
  std::size_t bland_after_ = 0;
};

}  // namespace

LpResult solve_relaxation(const MilpInstance& instance, std::span<const double> lower,
                          std::span<const double> upper) {
  if (lower.size() != instance.num_vars || upper.size() != instance.num_vars)
    throw Error(ErrorCode::InvalidArgument, "bound vectors have the wrong length");
  for (std::size_t j = 0; j < instance.num_vars; ++j)
    if (lower[j] > upper[j]) return LpResult{LpStatus::Infeasible, std::nullopt, std::nullopt, 0};
  DenseSimplex simplex(instance, lower, upper);
  return simplex.run();
}

LpResult solve_relaxation(const MilpInstance& instance) {
  return solve_relaxation(instance, instance.lower, instance.upper);
}

}  // namespace bbmdp
