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

#include "bbmdp/replay.hpp"

#include <algorithm>
#include <cmath>

#include "bbmdp/error.hpp"

namespace bbmdp {

std::size_t EpisodeFeatures::add(const FeatureMatrix& fm) {
  offsets_.push_back(data_.size());
  counts_.push_back(fm.rows());
  for (double v : fm.data) data_.push_back(static_cast<float>(v));
  return offsets_.size() - 1;
}

RowMatrix EpisodeFeatures::matrix(std::size_t node) const {
  RowMatrix x(static_cast<Eigen::Index>(counts_[node]), static_cast<Eigen::Index>(kNumFeatures));
  const float* src = data_.data() + offsets_[node];
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = src[i];
  return x;
}

void EpisodeFeatures::copy_row(std::size_t node, std::size_t row, RowMatrix& out, Eigen::Index at) const {
  const float* src = data_.data() + offsets_[node] + row * kNumFeatures;
  for (std::size_t c = 0; c < kNumFeatures; ++c) out(at, static_cast<Eigen::Index>(c)) = src[c];
}

SumTree::SumTree(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {
  leaves_ = 1;
  while (leaves_ < capacity_) leaves_ <<= 1;
  nodes_.assign(2 * leaves_, 0.0);
}

void SumTree::set(std::size_t i, double value) {
  std::size_t n = leaves_ + i;
  nodes_[n] = value;
  for (n >>= 1; n >= 1; n >>= 1) nodes_[n] = nodes_[2 * n] + nodes_[2 * n + 1];
}

std::size_t SumTree::find(double mass) const {
  std::size_t n = 1;
  while (n < leaves_) {
    const double left = nodes_[2 * n];
    if (mass < left || nodes_[2 * n + 1] <= 0.0) {
      n = 2 * n;
    } else {
      mass -= left;
      n = 2 * n + 1;
    }
  }
  return n - leaves_;
}

PrioritizedReplay::PrioritizedReplay(ReplayConfig config) : config_(config), tree_(config.capacity) {
  if (config_.capacity == 0) throw Error(ErrorCode::InvalidArgument, "replay capacity must be positive");
  items_.reserve(std::min<std::size_t>(config_.capacity, 1 << 16));
}

void PrioritizedReplay::add(ReplayTransition t) {
  const double p = max_priority_;
  if (items_.size() < config_.capacity) {
    items_.push_back(std::move(t));
    priorities_.push_back(p);
    tree_.set(items_.size() - 1, std::pow(p, config_.alpha));
    return;
  }
  items_[next_] = std::move(t);
  priorities_[next_] = p;
  tree_.set(next_, std::pow(p, config_.alpha));
  next_ = (next_ + 1) % config_.capacity;
}

double PrioritizedReplay::beta(std::size_t learner_step) const {
  if (config_.beta_steps == 0) return config_.beta_final;
  const double frac = std::min(1.0, static_cast<double>(learner_step) / static_cast<double>(config_.beta_steps));
  return config_.beta_init + frac * (config_.beta_final - config_.beta_init);
}

PrioritizedReplay::Sample PrioritizedReplay::sample(std::size_t batch, double beta, SplitMix64& rng) const {
  if (!ready() || items_.empty()) {
    throw Error(ErrorCode::PreconditionViolated, "replay buffer below its minimum fill");
  }
  Sample s;
  s.indices.resize(batch);
  s.weights.resize(batch);
  const double total = tree_.total();
  const double segment = total / static_cast<double>(batch);
  const double n = static_cast<double>(items_.size());
  double max_w = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const double mass = (static_cast<double>(b) + rng.uniform()) * segment;
    const std::size_t i = std::min(tree_.find(mass), items_.size() - 1);
    s.indices[b] = i;
    const double prob = tree_.get(i) / total;
    s.weights[b] = std::pow(n * prob, -beta);
    max_w = std::max(max_w, s.weights[b]);
  }
  for (double& w : s.weights) w /= max_w;
  return s;
}

void PrioritizedReplay::update(const std::vector<std::size_t>& indices, const std::vector<double>& td_errors) {
  if (indices.size() != td_errors.size()) throw Error(ErrorCode::InvalidArgument, "priority update size mismatch");
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const double p = std::abs(td_errors[b]) + config_.min_priority;
    priorities_.at(indices[b]) = p;
    tree_.set(indices[b], std::pow(p, config_.alpha));
    max_priority_ = std::max(max_priority_, p);
  }
}

}  // namespace bbmdp
