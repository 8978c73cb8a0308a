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

#include "bbmdp/targets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bbmdp/error.hpp"

namespace bbmdp {

const char* to_string(LossKind kind) { return kind == LossKind::MSE ? "mse" : "hlgauss"; }
const char* to_string(TargetKind kind) { return kind == TargetKind::BBMDP ? "bbmdp" : "treemdp"; }

void TargetConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (!(reward_per_transition < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "reward_per_transition must be negative");
  }
}

double expansion_constant(std::size_t expansions, double reward_unit) {
  return static_cast<double>(expansions) * 2.0 * reward_unit;
}

std::size_t greedy_row(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

FrontierValue greedy_frontier_value(const std::vector<SubtreeRecord>& records, const QFunction& online,
                                    const QFunction* target) {
  return [&records, &online, target](std::size_t r) {
    const FeatureMatrix& fm = records.at(r).features;
    if (fm.rows() == 0) throw Error(ErrorCode::PreconditionViolated, "record has no features");
    const RowMatrix x = to_matrix(fm);
    const auto v = online.values(x);
    const std::size_t a = greedy_row(v);
    if (!target) return v[a];
    return target->values(x)[a];
  };
}

Frontier bbmdp_frontier(const std::vector<SubtreeRecord>& records, std::size_t record, std::size_t k) {
  const std::size_t horizon = records.at(record).selected_at + k;
  Frontier f;
  // Preorder over the expanded part of T(o1); DFS keeps it contiguous in time.
  std::vector<std::size_t> stack{record};
  while (!stack.empty()) {
    const SubtreeRecord& rec = records[stack.back()];
    stack.pop_back();
    ++f.expansions;
    const std::optional<std::size_t> kids[2] = {rec.child_minus_record, rec.child_plus_record};
    for (int side = 1; side >= 0; --side) {
      if (!kids[side]) continue;
      if (records[*kids[side]].selected_at < horizon) stack.push_back(*kids[side]);
    }
    for (int side = 0; side < 2; ++side) {
      if (!kids[side]) {
        ++f.fathomed;
      } else if (records[*kids[side]].selected_at >= horizon) {
        f.open.push_back(*kids[side]);
      }
    }
  }
  return f;
}

Frontier treemdp_frontier(const std::vector<SubtreeRecord>& records, std::size_t record, std::size_t k) {
  Frontier f;
  struct Item {
    std::size_t record;
    std::size_t depth;
  };
  std::vector<Item> stack{{record, 0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const SubtreeRecord& rec = records[it.record];
    ++f.expansions;
    const std::optional<std::size_t> kids[2] = {rec.child_minus_record, rec.child_plus_record};
    for (int side = 1; side >= 0; --side) {
      if (kids[side] && it.depth + 1 < k) stack.push_back({*kids[side], it.depth + 1});
    }
    for (int side = 0; side < 2; ++side) {
      if (!kids[side]) {
        ++f.fathomed;
      } else if (it.depth + 1 == k) {
        f.open.push_back(*kids[side]);
      }
    }
  }
  return f;
}

namespace {

double assemble(const Frontier& f, const FrontierValue& value, double reward_unit) {
  double t = expansion_constant(f.expansions, reward_unit);
  for (std::size_t r : f.open) t += value(r);
  return t;
}

}  // namespace

double target_1step(const std::vector<SubtreeRecord>& records, std::size_t record,
                    const FrontierValue& value, const TargetConfig& config) {
  const SubtreeRecord& rec = records.at(record);
  double t = expansion_constant(1, config.reward_per_transition);
  if (rec.child_minus_record) t += value(*rec.child_minus_record);
  if (rec.child_plus_record) t += value(*rec.child_plus_record);
  return t;
}

double target_kstep(const std::vector<SubtreeRecord>& records, std::size_t record,
                    const FrontierValue& value, const TargetConfig& config) {
  config.validate();
  return assemble(bbmdp_frontier(records, record, config.k), value, config.reward_per_transition);
}

double target_treemdp_kstep(const std::vector<SubtreeRecord>& records, std::size_t record,
                            const FrontierValue& value, const TargetConfig& config, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  return assemble(treemdp_frontier(records, record, k), value, config.reward_per_transition);
}

LossResult loss_and_gradient(const QFunction& qfn, const RowMatrix& x, const std::vector<double>& targets,
                             const std::vector<double>& weights, LossKind loss) {
  const auto batch = static_cast<std::size_t>(x.rows());
  if (batch == 0 || targets.size() != batch || weights.size() != batch) {
    throw Error(ErrorCode::InvalidArgument, "batch arrays disagree in length");
  }
  const bool histogram = qfn.architecture().head == HeadKind::Histogram;
  if (loss == LossKind::HLGaussCE && !histogram) {
    throw Error(ErrorCode::InvalidArgument, "cross-entropy loss needs a histogram head");
  }

  ForwardCache cache;
  const RowMatrix out = qfn.forward(x, &cache);
  if (!out.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite network output in a batch of " << batch << " (max |x| = "
        << x.cwiseAbs().maxCoeff() << ", max |target| = "
        << std::abs(*std::min_element(targets.begin(), targets.end())) << ")";
    throw Error(ErrorCode::NumericFailure, msg.str());
  }

  LossResult res;
  res.predictions = qfn.decode_outputs(out);
  const double inv_b = 1.0 / static_cast<double>(batch);
  RowMatrix d_out(out.rows(), out.cols());
  const HistogramCodec& codec = qfn.codec();

  if (loss == LossKind::MSE) {
    RowMatrix p;
    std::vector<double> centers;
    if (histogram) {
      p = softmax_rows(out);
      centers = codec.bin_values();
    }
    for (std::size_t b = 0; b < batch; ++b) {
      const double err = res.predictions[b] - targets[b];
      res.loss += weights[b] * err * err * inv_b;
      const double dv = 2.0 * weights[b] * err * inv_b;
      if (!histogram) {
        d_out(b, 0) = dv;
        continue;
      }
      for (Eigen::Index i = 0; i < out.cols(); ++i) {
        d_out(b, i) = dv * p(b, i) * (centers[i] - res.predictions[b]);
      }
    }
  } else {
    for (std::size_t b = 0; b < batch; ++b) {
      const auto q = codec.encode(std::min(targets[b], 0.0));
      const double mx = out.row(b).maxCoeff();
      double z = 0.0;
      for (Eigen::Index i = 0; i < out.cols(); ++i) z += std::exp(out(b, i) - mx);
      const double log_z = std::log(z) + mx;
      double ce = 0.0;
      for (Eigen::Index i = 0; i < out.cols(); ++i) {
        const double log_p = out(b, i) - log_z;
        ce -= q[i] * log_p;
        d_out(b, i) = weights[b] * (std::exp(log_p) - q[i]) * inv_b;
      }
      res.loss += weights[b] * ce * inv_b;
    }
  }
  if (!std::isfinite(res.loss)) throw Error(ErrorCode::NumericFailure, "non-finite loss");
  res.gradient.assign(qfn.parameter_count(), 0.0);
  qfn.backward(cache, d_out, res.gradient);
  return res;
}

}  // namespace bbmdp
