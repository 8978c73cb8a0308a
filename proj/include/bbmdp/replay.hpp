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
#include <memory>
#include <vector>

#include "bbmdp/features.hpp"
#include "bbmdp/qfunction.hpp"
#include "bbmdp/rng.hpp"

namespace bbmdp {

/// Feature matrices of every branched node of one episode, stored as floats
/// and shared by all transitions cut from that episode.
class EpisodeFeatures {
 public:
  /// Returns the index of the added node.
  std::size_t add(const FeatureMatrix& fm);
  std::size_t size() const { return offsets_.size(); }
  std::size_t rows(std::size_t node) const { return counts_[node]; }
  RowMatrix matrix(std::size_t node) const;
  /// Appends row `row` of `node` to `out` at row index `at`.
  void copy_row(std::size_t node, std::size_t row, RowMatrix& out, Eigen::Index at) const;

 private:
  std::vector<float> data_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> counts_;
};

struct ReplayTransition {
  std::shared_ptr<const EpisodeFeatures> store;
  std::uint32_t focus = 0;       // node index in `store`
  std::uint32_t action_row = 0;  // chosen candidate row of the focus node
  double reward_sum = 0.0;       // accumulated expansion reward
  std::vector<std::uint32_t> frontier;  // open successor nodes in `store`
  std::uint32_t fathomed = 0;           // fathomed successors (value 0)
  bool truncated = false;
};

/// Binary sum tree over leaf priorities.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity = 1);
  void set(std::size_t i, double value);
  double get(std::size_t i) const { return nodes_[leaves_ + i]; }
  double total() const { return nodes_[1]; }
  /// Leaf i such that prefix(i) <= mass < prefix(i+1).
  std::size_t find(double mass) const;
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t leaves_;
  std::vector<double> nodes_;
};

struct ReplayConfig {
  std::size_t capacity = 100000;
  std::size_t min_fill = 20000;
  double alpha = 0.6;
  double beta_init = 0.4;
  double beta_final = 1.0;
  std::size_t beta_steps = 100000;
  double min_priority = 1e-3;
};

class PrioritizedReplay {
 public:
  explicit PrioritizedReplay(ReplayConfig config = {});

  /// Inserts with the largest priority seen so far, overwriting the oldest
  /// entry once full.
  void add(ReplayTransition t);
  std::size_t size() const { return items_.size(); }
  bool ready() const { return items_.size() >= config_.min_fill; }
  const ReplayTransition& at(std::size_t i) const { return items_[i]; }
  /// |td| + min_priority of slot i.
  double priority(std::size_t i) const { return priorities_[i]; }
  const SumTree& tree() const { return tree_; }
  const ReplayConfig& config() const { return config_; }

  /// Linear anneal of beta over the configured learner steps.
  double beta(std::size_t learner_step) const;

  struct Sample {
    std::vector<std::size_t> indices;
    std::vector<double> weights;  // (N P_i)^-beta over the batch maximum
  };
  /// Stratified proportional sampling. Throws Error(PreconditionViolated)
  /// before min_fill.
  Sample sample(std::size_t batch, double beta, SplitMix64& rng) const;
  void update(const std::vector<std::size_t>& indices, const std::vector<double>& td_errors);

 private:
  ReplayConfig config_;
  std::vector<ReplayTransition> items_;
  std::vector<double> priorities_;
  SumTree tree_;
  std::size_t next_ = 0;
  double max_priority_ = 1.0;
};

}  // namespace bbmdp
