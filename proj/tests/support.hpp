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

#include <functional>
#include <string>
#include <vector>

#include <doctest.h>

#include "bbmdp/error.hpp"
#include "bbmdp/milp.hpp"

namespace testing {

inline bbmdp::ErrorCode error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const bbmdp::Error& e) {
    return e.code();
  }
  FAIL("expected a bbmdp::Error");
  return bbmdp::ErrorCode::InvalidArgument;
}

// Binary instance from dense rows.
inline bbmdp::MilpInstance binary_instance(std::vector<double> c, const std::vector<std::vector<double>>& a,
                                           const std::vector<double>& b) {
  bbmdp::MilpInstance inst;
  inst.name = "test";
  inst.num_vars = c.size();
  inst.objective = std::move(c);
  inst.lower.assign(inst.num_vars, 0.0);
  inst.upper.assign(inst.num_vars, 1.0);
  for (std::size_t j = 0; j < inst.num_vars; ++j) inst.integer_indices.push_back(j);
  for (std::size_t i = 0; i < a.size(); ++i) {
    bbmdp::Row row;
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      if (a[i][j] != 0.0) row.coeffs.push_back({j, a[i][j]});
    }
    row.rhs = b[i];
    inst.rows.push_back(std::move(row));
  }
  return inst;
}

}  // namespace testing
