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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bbmdp/bnb.hpp"
#include "bbmdp/codec.hpp"
#include "bbmdp/env.hpp"
#include "bbmdp/instances.hpp"
#include "bbmdp/qfunction.hpp"
#include "bbmdp/replay.hpp"
#include "bbmdp/rng.hpp"
#include "bbmdp/targets.hpp"

namespace bbmdp {

/// Linear decays floored at their minima; the floor is returned exactly from
/// ceil((init - min) / decay) steps on.
struct ExplorationSchedule {
  double eps_init = 1.0;
  double eps_min = 0.025;
  double eps_decay = 1e-4;
  double temp_init = 1.0;
  double temp_min = 1e-3;
  double temp_decay = 1e-5;

  double epsilon(std::size_t step) const;
  double temperature(std::size_t step) const;
  std::size_t epsilon_floor_step() const;
  std::size_t temperature_floor_step() const;
};

enum class ActMode { Explore, Greedy };

/// Row index of the chosen candidate. Explore: uniform with probability
/// epsilon, else Boltzmann over decoded values at `temperature`. Greedy:
/// argmax, ties to the lowest row.
std::size_t act(const QFunction& qfn, const FeatureMatrix& fm, double epsilon, double temperature,
                SplitMix64& rng, ActMode mode);

/// Branching policy backed by a Q-function.
class QBranching final : public BranchingPolicy {
 public:
  QBranching(std::shared_ptr<const QFunction> qfn, ActMode mode = ActMode::Greedy,
             ExplorationSchedule schedule = {}, std::size_t start_step = 0);

  std::string name() const override { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  void reset(std::uint64_t seed) override { rng_ = SplitMix64(seed); }
  VarIndex choose(const SearchTree& tree, NodeId node, const std::vector<VarIndex>& candidates) override;

  /// Decisions taken so far (drives the exploration schedule).
  std::size_t steps() const { return step_; }

 private:
  std::shared_ptr<const QFunction> qfn_;
  ActMode mode_;
  ExplorationSchedule schedule_;
  std::size_t step_;
  SplitMix64 rng_;
  std::string name_ = "dqn";
};

struct TrainConfig {
  std::uint64_t seed = 0;
  FamilySpec family{SetCoverSpec{}, 0};
  std::size_t k = 3;
  TargetKind target = TargetKind::BBMDP;
  LossKind loss = LossKind::HLGaussCE;
  double reward_per_transition = -1.0;
  HistogramCodec codec{};
  QArchitecture architecture{};
  std::size_t batch_size = 128;
  double learning_rate = 5e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double grad_clip = 10.0;
  double tau_net = 1e-4;
  std::size_t agent_steps_per_update = 10;
  ReplayConfig replay{};
  ExplorationSchedule exploration{};
  std::size_t gradient_steps = 20000;
  std::size_t max_episodes = 1000000;
  std::size_t max_episode_steps = 5000;
  std::size_t validation_every = 2000;  // gradient steps; 0 disables
  std::size_t validation_instances = 10;
  std::uint64_t validation_seed = 1000000;
  std::string checkpoint_path;  // empty: no checkpoints
  std::size_t checkpoint_every = 0;

  void validate() const;
  /// Canonical JSON with every field.
  std::string to_json() const;
  /// Missing keys keep their defaults.
  static TrainConfig from_json(const std::string& text);
  std::uint64_t hash() const;
};

struct CurvePoint {
  std::size_t gradient_step = 0;
  std::size_t agent_steps = 0;
  std::size_t episodes = 0;
  double mean_loss = 0.0;  // over the updates since the previous point
  double epsilon = 0.0;
  double temperature = 0.0;
  std::optional<double> validation_geomean_nodes;
};

struct TrainResult {
  QFunction qfn;
  std::vector<CurvePoint> curve;
  std::size_t gradient_steps = 0;
  std::size_t agent_steps = 0;
  std::size_t episodes = 0;
  std::size_t truncated_episodes = 0;
  std::uint64_t config_hash = 0;
};

/// Instance source: returns the i-th training instance or nullopt when exhausted.
using InstanceStream = std::function<std::optional<MilpInstance>(std::size_t index)>;

/// Instances generated from config.family with per-episode derived seeds.
InstanceStream family_stream(const TrainConfig& config);

/// Called after each curve point is appended.
using TrainObserver = std::function<void(const CurvePoint&)>;

TrainResult train(const TrainConfig& config, const InstanceStream& instances = {},
                  const TrainObserver& observer = {});

/// k-step transitions of one finished DFS episode (records with features).
std::vector<ReplayTransition> make_transitions(const std::vector<SubtreeRecord>& records,
                                               const TrainConfig& config);

/// Targets for transitions, computed in one batched pass: online argmax and
/// target-network value at every open frontier node.
std::vector<double> batch_targets(const std::vector<const ReplayTransition*>& batch, const QFunction& online,
                                  const QFunction* target);

/// theta' <- (1 - tau) theta' + tau theta
void soft_update(std::vector<double>& target, const std::vector<double>& online, double tau);

/// Scales `grad` to global norm `max_norm` when larger; returns the pre-clip norm.
double clip_gradient(std::vector<double>& grad, double max_norm);

class Adam {
 public:
  Adam(std::size_t n, double lr, double beta1, double beta2, double eps);
  void step(std::vector<double>& params, const std::vector<double>& grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<double> m_, v_;
};

/// Geometric mean of greedy node counts on `count` generated instances.
double validation_geomean(const QFunction& qfn, const FamilySpec& family, std::uint64_t seed_base,
                          std::size_t count, std::size_t max_nodes = 100000);

std::string curve_json(const std::vector<CurvePoint>& curve);

struct Checkpoint {
  QFunction qfn;
  std::uint64_t config_hash = 0;
  std::uint64_t step = 0;
};

/// 16-byte header ("BBMDPQFN", u32 version, u32 reserved), config hash, step,
/// architecture and codec JSON, then theta as little-endian f64.
void save_checkpoint(const std::string& path, const QFunction& qfn, std::uint64_t config_hash,
                     std::uint64_t step);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace bbmdp
