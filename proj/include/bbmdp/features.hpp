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
#include <span>
#include <vector>

#include "bbmdp/bnb.hpp"

namespace bbmdp {

inline constexpr std::size_t kNumFeatures = 12;

/// One row of kNumFeatures entries per branching candidate, row-major.
struct FeatureMatrix {
  std::vector<VarIndex> candidates;
  std::vector<double> data;

  std::size_t rows() const { return candidates.size(); }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * kNumFeatures, kNumFeatures};
  }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

/// Pseudocost statistics gathered only from the branchings on the path from
/// the root to `node` (the node's own ancestors and their two children).
PseudocostTable path_pseudocosts(const SearchTree& tree, NodeId node);

/// Per-candidate features of `node`. The incumbent used is the one recorded
/// when the node was selected, falling back to the tree's current gub for a
/// node that has not been selected yet.
///
/// Layout: fractionality, distance to floor, c_j/|c|_inf, column density,
/// depth/n, normalized LP objective, normalized gap (1 without incumbent),
/// has-incumbent, bound range, pseudocost up, pseudocost down, candidates/n.
FeatureMatrix featurize(const SearchTree& tree, NodeId node, const std::vector<VarIndex>& candidates,
                        const PseudocostTable& stats);

/// featurize with the fractional candidates and path pseudocosts of `node`.
FeatureMatrix featurize_node(const SearchTree& tree, NodeId node);

}  // namespace bbmdp
