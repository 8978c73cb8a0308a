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

#include "bbmdp/features.hpp"

#include <cmath>
#include <string>

#include "bbmdp/error.hpp"

namespace bbmdp {

PseudocostTable path_pseudocosts(const SearchTree& tree, NodeId node) {
  PseudocostTable stats(tree.instance().num_vars);
  auto p = tree.nodes.at(node).parent;
  while (p) {
    const BnbNode& a = tree.nodes[*p];
    const VarIndex j = *a.branch_var;
    const double xhat = (*a.lp.point)[j];
    const double f = xhat - std::floor(xhat);
    const BnbNode& minus = tree.nodes[*a.child_minus];
    const BnbNode& plus = tree.nodes[*a.child_plus];
    if (minus.lp.optimal()) stats.record_down(j, std::max(0.0, *minus.lp.objective - *a.lp.objective) / f);
    if (plus.lp.optimal()) stats.record_up(j, std::max(0.0, *plus.lp.objective - *a.lp.objective) / (1.0 - f));
    p = a.parent;
  }
  return stats;
}

FeatureMatrix featurize(const SearchTree& tree, NodeId node, const std::vector<VarIndex>& candidates,
                        const PseudocostTable& stats) {
  const BnbNode& nd = tree.nodes.at(node);
  if (!nd.lp.optimal()) {
    throw Error(ErrorCode::PreconditionViolated, "node " + std::to_string(node) + " has no LP optimum");
  }
  if (candidates.empty()) throw Error(ErrorCode::PreconditionViolated, "no candidates to featurize");

  const MilpInstance& inst = tree.instance();
  const double n = static_cast<double>(inst.num_vars);
  const double m = static_cast<double>(inst.num_cons());

  double cmax = 0.0;
  for (double c : inst.objective) cmax = std::max(cmax, std::abs(c));
  std::vector<double> nnz(inst.num_vars, 0.0);
  for (const Row& row : inst.rows) {
    for (const RowEntry& e : row.coeffs) nnz[e.col] += 1.0;
  }

  std::vector<double> lower, upper;
  node_bounds(tree, node, lower, upper);

  const double root_obj = tree.root_objective();
  const double scale = 1.0 + std::abs(root_obj);
  const double obj = *nd.lp.objective;
  const double gub = nd.incumbent_at_selection.value_or(tree.gub);
  const bool has_inc = std::isfinite(gub);
  const auto& x = *nd.lp.point;

  FeatureMatrix fm;
  fm.candidates = candidates;
  fm.data.reserve(candidates.size() * kNumFeatures);
  for (VarIndex j : candidates) {
    const double xj = x[j];
    const double range = upper[j] - lower[j];
    const double row[kNumFeatures] = {
        fractionality(xj),
        xj - std::floor(xj),
        cmax > 0.0 ? inst.objective[j] / cmax : 0.0,
        m > 0.0 ? nnz[j] / m : 0.0,
        static_cast<double>(nd.depth) / n,
        (obj - root_obj) / scale,
        has_inc ? (gub - obj) / (1.0 + std::abs(gub)) : 1.0,
        has_inc ? 1.0 : 0.0,
        range / (1.0 + range),
        stats.up_estimate(j, 0.0) / scale,
        stats.down_estimate(j, 0.0) / scale,
        static_cast<double>(candidates.size()) / n,
    };
    fm.data.insert(fm.data.end(), row, row + kNumFeatures);
  }
  return fm;
}

FeatureMatrix featurize_node(const SearchTree& tree, NodeId node) {
  return featurize(tree, node, fractional_candidates(tree, node), path_pseudocosts(tree, node));
}

}  // namespace bbmdp
