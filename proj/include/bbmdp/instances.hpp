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
#include <map>
#include <string>
#include <variant>

#include "bbmdp/milp.hpp"

namespace bbmdp {

struct SetCoverSpec {
  std::size_t rows = 40;
  std::size_t cols = 80;
  double density = 0.12;
};

struct CombAuctionSpec {
  std::size_t items = 20;
  std::size_t bids = 80;
};

struct MultiKnapsackSpec {
  std::size_t items = 20;
  std::size_t knapsacks = 3;
};

struct MaxIndepSetSpec {
  std::size_t nodes = 60;
  std::size_t affinity = 4;
};

struct FamilySpec {
  std::variant<SetCoverSpec, CombAuctionSpec, MultiKnapsackSpec, MaxIndepSetSpec> params;
  std::uint64_t seed = 0;
};

/// "setcover", "cauction", "knapsack" or "indset".
std::string family_name(const FamilySpec& spec);

/// Throws Error(InvalidArgument) on a zero count or a density outside (0,1].
void validate_spec(const FamilySpec& spec);

/// Deterministic per (family, parameters, seed). Every integer variable is binary.
MilpInstance generate(const FamilySpec& spec);

/// Preset name ("tiny", "small", "paper-shape") -> family name -> spec with seed 0.
std::map<std::string, std::map<std::string, FamilySpec>> desk_presets();

/// The preset spec for one family with the seed replaced.
FamilySpec preset_spec(const std::string& preset, const std::string& family, std::uint64_t seed);

/// JSON object {"family": ..., <params>..., "seed": ...}.
std::string spec_to_json(const FamilySpec& spec);
FamilySpec spec_from_json(const std::string& text);

}  // namespace bbmdp
