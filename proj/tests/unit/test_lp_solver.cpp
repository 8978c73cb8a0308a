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

#include <cmath>

#include "bbmdp/lp_solver.hpp"
#include "bbmdp/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace bbmdp;

namespace {

MilpInstance random_lp(std::uint64_t seed, std::size_t n, std::size_t m) {
  SplitMix64 rng(seed);
  MilpInstance inst;
  inst.name = "lp";
  inst.num_vars = n;
  for (std::size_t j = 0; j < n; ++j) {
    inst.objective.push_back(rng.uniform(-5, 5));
    inst.lower.push_back(rng.uniform(-3, 0));
    inst.upper.push_back(rng.uniform(0.5, 4));
  }
  for (std::size_t i = 0; i < m; ++i) {
    Row row;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.bernoulli(0.7)) row.coeffs.push_back({j, rng.uniform(-4, 4)});
    }
    row.rhs = rng.uniform(-2, 6);
    inst.rows.push_back(row);
  }
  return inst;
}

}  // namespace

TEST_CASE("random boxed LPs match vertex enumeration") {
  std::size_t optimal = 0, infeasible = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const MilpInstance inst = random_lp(seed, 5, 4);
    const LpResult lp = solve_relaxation(inst);
    const auto ref = oracle::vertex_optimum(inst);
    CAPTURE(seed);
    if (!ref) {
      CHECK(lp.status == LpStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(lp.optimal());
    CHECK(*lp.objective == doctest::Approx(*ref).epsilon(1e-6).scale(1.0));
    CHECK(oracle::feasible(inst, *lp.point, kFeasEps));
    ++optimal;
  }
  CHECK(optimal > 100);
  MESSAGE("optimal " << optimal << " infeasible " << infeasible);
}

TEST_CASE("explicit bounds override the instance box") {
  const MilpInstance inst = random_lp(11, 5, 4);
  std::vector<double> lo = inst.lower, hi = inst.upper;
  hi[0] = lo[0];
  MilpInstance fixed = inst;
  fixed.upper[0] = fixed.lower[0];
  const LpResult a = solve_relaxation(inst, lo, hi);
  const LpResult b = solve_relaxation(fixed);
  CHECK(a == b);
}

TEST_CASE("infeasible and unbounded relaxations") {
  // x0 + x1 <= -1 with x >= 0
  const MilpInstance infeasible = testing::binary_instance({1, 1}, {{1, 1}}, {-1});
  CHECK(solve_relaxation(infeasible).status == LpStatus::Infeasible);

  MilpInstance unbounded = testing::binary_instance({-1, 0}, {{-1, 1}}, {0});
  unbounded.integer_indices.clear();
  unbounded.upper = {kInf, kInf};
  CHECK(solve_relaxation(unbounded).status == LpStatus::Unbounded);

  MilpInstance crossing = testing::binary_instance({1}, {}, {});
  std::vector<double> lo{1.0}, hi{0.0};
  CHECK(solve_relaxation(crossing, lo, hi).status == LpStatus::Infeasible);
}

TEST_CASE("degenerate LP terminates") {
  // Many redundant rows through the optimal vertex.
  MilpInstance inst = testing::binary_instance({-1, -1, -1}, {}, {});
  inst.integer_indices.clear();
  for (int k = 0; k < 12; ++k) {
    Row row;
    const double scale = 1.0 + k;
    row.coeffs = {{0, scale}, {1, scale}, {2, scale}};
    row.rhs = 1.5 * scale;
    inst.rows.push_back(row);
  }
  const LpResult lp = solve_relaxation(inst);
  REQUIRE(lp.optimal());
  CHECK(*lp.objective == doctest::Approx(-1.5));
}

TEST_CASE("integrality helpers") {
  CHECK(fractionality(2.3) == doctest::Approx(0.3));
  CHECK(fractionality(2.7) == doctest::Approx(0.3));
  CHECK(fractionality(-0.25) == doctest::Approx(0.25));
  const MilpInstance inst = testing::binary_instance({-1, -1}, {{2, 2}}, {3});
  const LpResult lp = solve_relaxation(inst);
  REQUIRE(lp.optimal());
  CHECK(*lp.objective == doctest::Approx(-1.5));
  CHECK_FALSE(is_integral(lp, inst));
}
