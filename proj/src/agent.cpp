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

#include "bbmdp/agent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "bbmdp/error.hpp"
#include "bbmdp/metrics.hpp"

namespace bbmdp {

namespace {

double linear_floor(double init, double min, double decay, std::size_t step, std::size_t floor_step) {
  if (step >= floor_step) return min;
  return std::max(min, init - decay * static_cast<double>(step));
}

std::size_t floor_step_of(double init, double min, double decay) {
  if (decay <= 0.0) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(std::ceil((init - min) / decay));
}

constexpr std::size_t kCurveEvery = 500;

}  // namespace

std::size_t ExplorationSchedule::epsilon_floor_step() const { return floor_step_of(eps_init, eps_min, eps_decay); }

std::size_t ExplorationSchedule::temperature_floor_step() const {
  return floor_step_of(temp_init, temp_min, temp_decay);
}

double ExplorationSchedule::epsilon(std::size_t step) const {
  return linear_floor(eps_init, eps_min, eps_decay, step, epsilon_floor_step());
}

double ExplorationSchedule::temperature(std::size_t step) const {
  return linear_floor(temp_init, temp_min, temp_decay, step, temperature_floor_step());
}

std::size_t act(const QFunction& qfn, const FeatureMatrix& fm, double epsilon, double temperature,
                SplitMix64& rng, ActMode mode) {
  const std::size_t n = fm.rows();
  if (n == 0) throw Error(ErrorCode::PreconditionViolated, "no candidates to act on");
  if (mode == ActMode::Explore && rng.uniform() < epsilon) return rng.below(n);
  const auto values = qfn.values(fm);
  if (mode == ActMode::Greedy) return greedy_row(values);
  const double mx = *std::max_element(values.begin(), values.end());
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp((values[i] - mx) / temperature);
    total += w[i];
  }
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < n; ++i) {
    if (u < w[i]) return i;
    u -= w[i];
  }
  return greedy_row(values);
}

QBranching::QBranching(std::shared_ptr<const QFunction> qfn, ActMode mode, ExplorationSchedule schedule,
                       std::size_t start_step)
    : qfn_(std::move(qfn)), mode_(mode), schedule_(schedule), step_(start_step) {
  if (!qfn_) throw Error(ErrorCode::InvalidArgument, "null Q-function");
}

VarIndex QBranching::choose(const SearchTree& tree, NodeId node, const std::vector<VarIndex>& candidates) {
  const FeatureMatrix fm = featurize(tree, node, candidates, path_pseudocosts(tree, node));
  const std::size_t row =
      act(*qfn_, fm, schedule_.epsilon(step_), schedule_.temperature(step_), rng_, mode_);
  ++step_;
  return candidates[row];
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
  };
  need(k >= 1, "k must be >= 1");
  need(reward_per_transition < 0.0, "reward_per_transition must be negative");
  need(batch_size >= 1, "batch_size must be >= 1");
  need(learning_rate > 0.0, "learning_rate must be positive");
  need(grad_clip > 0.0, "grad_clip must be positive");
  need(tau_net > 0.0 && tau_net <= 1.0, "tau_net must lie in (0, 1]");
  need(agent_steps_per_update >= 1, "agent_steps_per_update must be >= 1");
  need(replay.capacity >= 1 && replay.min_fill <= replay.capacity, "replay min_fill exceeds capacity");
  need(replay.alpha >= 0.0 && replay.min_priority > 0.0, "bad replay priority settings");
  need(max_episode_steps >= 1, "max_episode_steps must be >= 1");
  need(!(loss == LossKind::HLGaussCE && architecture.head == HeadKind::Scalar),
       "the histogram loss needs a histogram head");
  codec.validate();
  validate_spec(family);
}

std::string TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["family"] = nlohmann::ordered_json::parse(spec_to_json(family));
  j["k"] = k;
  j["target"] = to_string(target);
  j["loss"] = to_string(loss);
  j["reward_per_transition"] = reward_per_transition;
  j["codec"] = nlohmann::ordered_json::parse(codec.to_json());
  j["architecture"] = nlohmann::ordered_json::parse(architecture.to_json());
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["adam_beta1"] = adam_beta1;
  j["adam_beta2"] = adam_beta2;
  j["adam_eps"] = adam_eps;
  j["grad_clip"] = grad_clip;
  j["tau_net"] = tau_net;
  j["agent_steps_per_update"] = agent_steps_per_update;
  j["replay"] = {{"capacity", replay.capacity},       {"min_fill", replay.min_fill},
                 {"alpha", replay.alpha},             {"beta_init", replay.beta_init},
                 {"beta_final", replay.beta_final},   {"beta_steps", replay.beta_steps},
                 {"min_priority", replay.min_priority}};
  j["exploration"] = {{"eps_init", exploration.eps_init},     {"eps_min", exploration.eps_min},
                      {"eps_decay", exploration.eps_decay},   {"temp_init", exploration.temp_init},
                      {"temp_min", exploration.temp_min},     {"temp_decay", exploration.temp_decay}};
  j["gradient_steps"] = gradient_steps;
  j["max_episodes"] = max_episodes;
  j["max_episode_steps"] = max_episode_steps;
  j["validation_every"] = validation_every;
  j["validation_instances"] = validation_instances;
  j["validation_seed"] = validation_seed;
  j["checkpoint_path"] = checkpoint_path;
  j["checkpoint_every"] = checkpoint_every;
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  TrainConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  try {
    if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "train config must be an object");
    c.seed = j.value("seed", c.seed);
    if (j.contains("family")) c.family = spec_from_json(j["family"].dump());
    c.k = j.value("k", c.k);
    const std::string target = j.value("target", std::string(to_string(c.target)));
    if (target == "bbmdp") {
      c.target = TargetKind::BBMDP;
    } else if (target == "treemdp") {
      c.target = TargetKind::TreeMDP;
    } else {
      throw Error(ErrorCode::SchemaViolation, "unknown target '" + target + "'");
    }
    const std::string loss = j.value("loss", std::string(to_string(c.loss)));
    if (loss == "hlgauss") {
      c.loss = LossKind::HLGaussCE;
    } else if (loss == "mse") {
      c.loss = LossKind::MSE;
    } else {
      throw Error(ErrorCode::SchemaViolation, "unknown loss '" + loss + "'");
    }
    c.reward_per_transition = j.value("reward_per_transition", c.reward_per_transition);
    if (j.contains("codec")) c.codec = HistogramCodec::from_json(j["codec"].dump());
    if (j.contains("architecture")) c.architecture = QArchitecture::from_json(j["architecture"].dump());
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_eps = j.value("adam_eps", c.adam_eps);
    c.grad_clip = j.value("grad_clip", c.grad_clip);
    c.tau_net = j.value("tau_net", c.tau_net);
    c.agent_steps_per_update = j.value("agent_steps_per_update", c.agent_steps_per_update);
    if (j.contains("replay")) {
      const auto& r = j["replay"];
      c.replay.capacity = r.value("capacity", c.replay.capacity);
      c.replay.min_fill = r.value("min_fill", c.replay.min_fill);
      c.replay.alpha = r.value("alpha", c.replay.alpha);
      c.replay.beta_init = r.value("beta_init", c.replay.beta_init);
      c.replay.beta_final = r.value("beta_final", c.replay.beta_final);
      c.replay.beta_steps = r.value("beta_steps", c.replay.beta_steps);
      c.replay.min_priority = r.value("min_priority", c.replay.min_priority);
    }
    if (j.contains("exploration")) {
      const auto& e = j["exploration"];
      c.exploration.eps_init = e.value("eps_init", c.exploration.eps_init);
      c.exploration.eps_min = e.value("eps_min", c.exploration.eps_min);
      c.exploration.eps_decay = e.value("eps_decay", c.exploration.eps_decay);
      c.exploration.temp_init = e.value("temp_init", c.exploration.temp_init);
      c.exploration.temp_min = e.value("temp_min", c.exploration.temp_min);
      c.exploration.temp_decay = e.value("temp_decay", c.exploration.temp_decay);
    }
    c.gradient_steps = j.value("gradient_steps", c.gradient_steps);
    c.max_episodes = j.value("max_episodes", c.max_episodes);
    c.max_episode_steps = j.value("max_episode_steps", c.max_episode_steps);
    c.validation_every = j.value("validation_every", c.validation_every);
    c.validation_instances = j.value("validation_instances", c.validation_instances);
    c.validation_seed = j.value("validation_seed", c.validation_seed);
    c.checkpoint_path = j.value("checkpoint_path", c.checkpoint_path);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, e.what());
  }
  c.validate();
  return c;
}

std::uint64_t TrainConfig::hash() const { return fnv1a64(to_json()); }

// ---------------------------------------------------------------------------

std::vector<ReplayTransition> make_transitions(const std::vector<SubtreeRecord>& records,
                                               const TrainConfig& config) {
  auto store = std::make_shared<EpisodeFeatures>();
  for (const SubtreeRecord& rec : records) store->add(rec.features);
  std::vector<ReplayTransition> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Frontier f = config.target == TargetKind::BBMDP ? bbmdp_frontier(records, i, config.k)
                                                          : treemdp_frontier(records, i, config.k);
    ReplayTransition t;
    t.store = store;
    t.focus = static_cast<std::uint32_t>(i);
    t.action_row = static_cast<std::uint32_t>(records[i].action_row);
    t.reward_sum = expansion_constant(f.expansions, config.reward_per_transition);
    for (std::size_t r : f.open) t.frontier.push_back(static_cast<std::uint32_t>(r));
    t.fathomed = static_cast<std::uint32_t>(f.fathomed);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> batch_targets(const std::vector<const ReplayTransition*>& batch, const QFunction& online,
                                  const QFunction* target) {
  Eigen::Index total_rows = 0;
  for (const ReplayTransition* t : batch) {
    for (std::uint32_t node : t->frontier) total_rows += static_cast<Eigen::Index>(t->store->rows(node));
  }
  std::vector<double> targets(batch.size());
  if (total_rows == 0) {
    for (std::size_t b = 0; b < batch.size(); ++b) targets[b] = batch[b]->reward_sum;
    return targets;
  }
  RowMatrix x(total_rows, static_cast<Eigen::Index>(kNumFeatures));
  Eigen::Index at = 0;
  for (const ReplayTransition* t : batch) {
    for (std::uint32_t node : t->frontier) {
      const std::size_t rows = t->store->rows(node);
      for (std::size_t r = 0; r < rows; ++r) t->store->copy_row(node, r, x, at++);
    }
  }
  const auto on = online.values(x);
  const auto tg = target ? target->values(x) : on;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const ReplayTransition* t = batch[b];
    double value = t->reward_sum;
    for (std::uint32_t node : t->frontier) {
      const std::size_t rows = t->store->rows(node);
      std::size_t best = pos;
      for (std::size_t r = pos + 1; r < pos + rows; ++r) {
        if (on[r] > on[best]) best = r;
      }
      value += tg[best];
      pos += rows;
    }
    targets[b] = value;
  }
  return targets;
}

void soft_update(std::vector<double>& target, const std::vector<double>& online, double tau) {
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = (1.0 - tau) * target[i] + tau * online[i];
}

double clip_gradient(std::vector<double>& grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double s = max_norm / norm;
    for (double& g : grad) g *= s;
  }
  return norm;
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

double validation_geomean(const QFunction& qfn, const FamilySpec& family, std::uint64_t seed_base,
                          std::size_t count, std::size_t max_nodes) {
  auto shared = std::make_shared<const QFunction>(qfn);
  QBranching policy(shared, ActMode::Greedy);
  SolveLimits limits;
  limits.max_nodes = max_nodes;
  std::vector<double> nodes;
  for (std::size_t i = 0; i < count; ++i) {
    FamilySpec spec = family;
    spec.seed = seed_base + i;
    const SolveReport r = solve(generate(spec), policy, {}, limits, spec.seed);
    nodes.push_back(static_cast<double>(r.node_count));
  }
  return geometric_mean(nodes);
}

InstanceStream family_stream(const TrainConfig& config) {
  const FamilySpec family = config.family;
  const std::uint64_t master = config.seed;
  return [family, master](std::size_t index) -> std::optional<MilpInstance> {
    FamilySpec spec = family;
    spec.seed = derive_seed(master, 0x10000 + index);
    return generate(spec);
  };
}

TrainResult train(const TrainConfig& config, const InstanceStream& instances, const TrainObserver& observer) {
  config.validate();
  const InstanceStream stream = instances ? instances : family_stream(config);

  TrainResult result;
  result.config_hash = config.hash();
  auto online = std::make_shared<QFunction>(config.architecture, config.codec, derive_seed(config.seed, 1));
  QFunction target_net = *online;
  Adam adam(online->parameter_count(), config.learning_rate, config.adam_beta1, config.adam_beta2,
            config.adam_eps);
  PrioritizedReplay replay(config.replay);
  SplitMix64 sample_rng(derive_seed(config.seed, 3));

  EnvConfig env;
  env.reward_per_transition = config.reward_per_transition;
  env.max_steps = config.max_episode_steps;

  std::size_t update_credit = 0;
  double loss_sum = 0.0;
  std::size_t loss_count = 0;

  auto save = [&](const std::string& path) {
    if (!path.empty()) save_checkpoint(path, *online, result.config_hash, result.gradient_steps);
  };
  auto emit_point = [&](bool validate_now) {
    CurvePoint p;
    p.gradient_step = result.gradient_steps;
    p.agent_steps = result.agent_steps;
    p.episodes = result.episodes;
    p.mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    p.epsilon = config.exploration.epsilon(result.agent_steps);
    p.temperature = config.exploration.temperature(result.agent_steps);
    if (validate_now && config.validation_instances > 0) {
      p.validation_geomean_nodes = validation_geomean(*online, config.family, config.validation_seed,
                                                      config.validation_instances);
    }
    loss_sum = 0.0;
    loss_count = 0;
    result.curve.push_back(p);
    if (observer) observer(p);
  };

  auto gradient_step = [&]() {
    const auto sample = replay.sample(config.batch_size, replay.beta(result.gradient_steps), sample_rng);
    std::vector<const ReplayTransition*> batch;
    batch.reserve(sample.indices.size());
    RowMatrix x(static_cast<Eigen::Index>(sample.indices.size()), static_cast<Eigen::Index>(kNumFeatures));
    for (std::size_t b = 0; b < sample.indices.size(); ++b) {
      const ReplayTransition& t = replay.at(sample.indices[b]);
      batch.push_back(&t);
      t.store->copy_row(t.focus, t.action_row, x, static_cast<Eigen::Index>(b));
    }
    const auto targets = batch_targets(batch, *online, &target_net);
    LossResult lr;
    try {
      lr = loss_and_gradient(*online, x, targets, sample.weights, config.loss);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NumericFailure && !config.checkpoint_path.empty()) {
        save(config.checkpoint_path + ".nan");
      }
      throw;
    }
    clip_gradient(lr.gradient, config.grad_clip);
    adam.step(online->parameters(), lr.gradient);
    soft_update(target_net.parameters(), online->parameters(), config.tau_net);
    std::vector<double> td(targets.size());
    for (std::size_t b = 0; b < td.size(); ++b) td[b] = lr.predictions[b] - targets[b];
    replay.update(sample.indices, td);
    loss_sum += lr.loss;
    ++loss_count;
    ++result.gradient_steps;
    const bool validate_now = config.validation_every > 0 && result.gradient_steps % config.validation_every == 0;
    if (validate_now || result.gradient_steps % kCurveEvery == 0) emit_point(validate_now);
    if (config.checkpoint_every > 0 && result.gradient_steps % config.checkpoint_every == 0) {
      save(config.checkpoint_path);
    }
  };

  while (result.gradient_steps < config.gradient_steps && result.episodes < config.max_episodes) {
    const auto instance = stream(result.episodes);
    if (!instance) break;
    QBranching explorer(online, ActMode::Explore, config.exploration, result.agent_steps);
    const Episode ep = rollout(*instance, explorer, env, derive_seed(config.seed, 0x20000 + result.episodes));
    ++result.episodes;
    result.agent_steps += ep.step_count();
    if (ep.truncated) {
      ++result.truncated_episodes;
      continue;
    }
    if (ep.step_count() > 0) {
      for (ReplayTransition& t : make_transitions(subtree_records(ep, true), config)) replay.add(std::move(t));
    }
    if (!replay.ready()) continue;
    update_credit += ep.step_count();
    while (update_credit >= config.agent_steps_per_update && result.gradient_steps < config.gradient_steps) {
      update_credit -= config.agent_steps_per_update;
      gradient_step();
    }
  }
  if (result.curve.empty() || result.curve.back().gradient_step != result.gradient_steps) {
    emit_point(config.validation_every > 0);
  }
  save(config.checkpoint_path);
  result.qfn = *online;
  return result;
}

std::string curve_json(const std::vector<CurvePoint>& curve) {
  auto arr = nlohmann::ordered_json::array();
  for (const CurvePoint& p : curve) {
    nlohmann::ordered_json j;
    j["gradient_step"] = p.gradient_step;
    j["agent_steps"] = p.agent_steps;
    j["episodes"] = p.episodes;
    j["mean_loss"] = p.mean_loss;
    j["epsilon"] = p.epsilon;
    j["temperature"] = p.temperature;
    if (p.validation_geomean_nodes) {
      j["validation_geomean_nodes"] = *p.validation_geomean_nodes;
    } else {
      j["validation_geomean_nodes"] = nullptr;
    }
    arr.push_back(j);
  }
  return arr.dump();
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'B', 'B', 'M', 'D', 'P', 'Q', 'F', 'N'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(const std::string& in, std::size_t& pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > in.size()) throw Error(ErrorCode::MalformedDocument, "truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += static_cast<std::size_t>(bytes);
  return v;
}

std::string get_bytes(const std::string& in, std::size_t& pos, std::size_t n) {
  if (pos + n > in.size()) throw Error(ErrorCode::MalformedDocument, "truncated checkpoint");
  std::string s = in.substr(pos, n);
  pos += n;
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const QFunction& qfn, std::uint64_t config_hash,
                     std::uint64_t step) {
  std::string out(kMagic, sizeof kMagic);
  put_le(out, kCheckpointVersion, 4);
  put_le(out, 0, 4);
  put_le(out, config_hash, 8);
  put_le(out, step, 8);
  const std::string arch = qfn.architecture().to_json();
  const std::string codec = qfn.codec().to_json();
  put_le(out, arch.size(), 4);
  out += arch;
  put_le(out, codec.size(), 4);
  out += codec;
  put_le(out, qfn.parameter_count(), 8);
  for (double v : qfn.parameters()) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write checkpoint '" + path + "'");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::Io, "failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot read checkpoint '" + path + "'");
  const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  if (get_bytes(in, pos, sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw Error(ErrorCode::MalformedDocument, "'" + path + "' is not a checkpoint");
  }
  const auto version = get_le(in, pos, 4);
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::MalformedDocument, "unsupported checkpoint version " + std::to_string(version));
  }
  get_le(in, pos, 4);
  Checkpoint cp;
  cp.config_hash = get_le(in, pos, 8);
  cp.step = get_le(in, pos, 8);
  const auto arch = QArchitecture::from_json(get_bytes(in, pos, get_le(in, pos, 4)));
  const auto codec = HistogramCodec::from_json(get_bytes(in, pos, get_le(in, pos, 4)));
  cp.qfn = QFunction(arch, codec, 0);
  const auto count = get_le(in, pos, 8);
  if (count != cp.qfn.parameter_count()) {
    throw Error(ErrorCode::MalformedDocument, "checkpoint parameter count does not match its architecture");
  }
  for (double& v : cp.qfn.parameters()) v = std::bit_cast<double>(get_le(in, pos, 8));
  if (pos != in.size()) throw Error(ErrorCode::MalformedDocument, "trailing bytes in checkpoint");
  return cp;
}

}  // namespace bbmdp
