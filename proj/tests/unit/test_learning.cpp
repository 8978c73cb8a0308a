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
#include <numeric>
#include <vector>

#include "bbmdp/codec.hpp"
#include "bbmdp/env.hpp"
#include "bbmdp/instances.hpp"
#include "bbmdp/qfunction.hpp"
#include "bbmdp/replay.hpp"
#include "bbmdp/rng.hpp"
#include "bbmdp/targets.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace bbmdp;

namespace {

HistogramCodec toy_codec() { return {18, 0.5, 18.5, 0.75}; }

RowMatrix random_inputs(std::size_t rows, std::uint64_t seed) {
  SplitMix64 rng(seed);
  RowMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(kNumFeatures));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
  return x;
}

double fd_max_relative_error(const QFunction& qfn, const RowMatrix& x, const std::vector<double>& t,
                             const std::vector<double>& w, LossKind loss) {
  const LossResult analytic = loss_and_gradient(qfn, x, t, w, loss);
  QFunction probe = qfn;
  double worst = 0.0;
  const double h = 1e-5;
  for (std::size_t k = 0; k < probe.parameter_count(); ++k) {
    const double keep = probe.parameters()[k];
    probe.parameters()[k] = keep + h;
    const double up = loss_and_gradient(probe, x, t, w, loss).loss;
    probe.parameters()[k] = keep - h;
    const double down = loss_and_gradient(probe, x, t, w, loss).loss;
    probe.parameters()[k] = keep;
    const double fd = (up - down) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic.gradient[k]), 1e-6});
    worst = std::max(worst, std::abs(fd - analytic.gradient[k]) / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("codec encodes a normalized Gaussian histogram") {
  const HistogramCodec c;
  for (double v : {0.0, -1e-9, -0.3, -2.0, -10.0, -1234.5, -1e6, -1e300}) {
    const auto p = c.encode(v);
    REQUIRE(p.size() == c.m_bins);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    for (double q : p) CHECK(q >= 0.0);
    const double u = std::clamp(std::log2(std::max(-v, std::exp2(c.psi_min))), c.psi_min, c.psi_max);
    const auto ref = oracle::gaussian_histogram(u, c.sigma, c.psi_min, c.psi_max, c.m_bins);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
  CHECK(testing::error_code_of([&] { c.encode(0.5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("codec decode") {
  const HistogramCodec c = toy_codec();
  std::vector<double> p(18, 0.0);
  p[2] = 1.0;  // center 3
  CHECK(c.decode(p) == -8.0);
  std::fill(p.begin(), p.end(), 0.0);
  p[0] = p[1] = 0.5;
  CHECK(c.decode(p) == -3.0);
  CHECK(testing::error_code_of([&] { c.decode(std::vector<double>(17, 1.0 / 17)); }) ==
        ErrorCode::InvalidArgument);
  p[0] = 0.6;
  CHECK(testing::error_code_of([&] { c.decode(p); }) == ErrorCode::InvalidArgument);
  p[0] = 1.5;
  p[1] = -0.5;
  CHECK(testing::error_code_of([&] { c.decode(p); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("toy codec masses") {
  const HistogramCodec c = toy_codec();
  const double phi = oracle::normal_cdf(0.5 / 0.75);
  // Interior bin: value -4 sits on the center of the second bin.
  CHECK(c.encode(-4.0)[1] == doctest::Approx(2 * phi - 1).epsilon(1e-3));
  CHECK(std::abs(c.encode(-4.0)[1] - 0.495) < 1e-3);
  // Boundary bin: value -2 sits on the first center, the lower tail folds in.
  CHECK(c.encode(-2.0)[0] == doctest::Approx(phi).epsilon(1e-3));
}

TEST_CASE("codec round trip and monotonicity") {
  const HistogramCodec c;
  for (double v : {-2.0, -10.0, -100.0, -1000.0}) {
    CAPTURE(v);
    CHECK(std::abs(c.decode(c.encode(v)) - v) / std::abs(v) <= 0.25);
  }
  std::vector<double> p(c.m_bins, 1.0 / static_cast<double>(c.m_bins));
  double prev = c.decode(p);
  for (std::size_t i = 0; i + 1 < c.m_bins; ++i) {
    p[i + 1] += p[i] / 2;
    p[i] /= 2;
    const double now = c.decode(p);
    CHECK(now < prev);
    prev = now;
  }
  CHECK(HistogramCodec::from_json(toy_codec().to_json()) == toy_codec());
  CHECK(testing::error_code_of([] { HistogramCodec::from_json(R"({"sigma": -1})"); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("Q-function forward pass") {
  QArchitecture arch;
  arch.hidden = {8, 8};
  const QFunction a(arch, HistogramCodec{}, 1);
  const QFunction b(arch, HistogramCodec{}, 1);
  const QFunction c(arch, HistogramCodec{}, 2);
  CHECK(a.parameters() == b.parameters());
  CHECK(a.parameters() != c.parameters());
  CHECK(a.parameter_count() == (12 * 8 + 8) + (8 * 8 + 8) + (8 * 18 + 18));

  const RowMatrix x = random_inputs(5, 3);
  const RowMatrix out = a.forward(x);
  CHECK(out.rows() == 5);
  CHECK(out.cols() == 18);
  const RowMatrix p = softmax_rows(out);
  const auto v = a.values(x);
  for (Eigen::Index r = 0; r < 5; ++r) {
    std::vector<double> row(p.row(r).data(), p.row(r).data() + 18);
    CHECK(v[static_cast<std::size_t>(r)] == doctest::Approx(a.codec().decode(row)));
  }
  CHECK(QArchitecture::from_json(arch.to_json()) == arch);

  QArchitecture lin;
  lin.kind = ApproximatorKind::Linear;
  lin.head = HeadKind::Scalar;
  const QFunction l(lin, HistogramCodec{}, 4);
  CHECK(l.parameter_count() == 13);
  const auto lv = l.values(x);
  for (Eigen::Index r = 0; r < 5; ++r) {
    double ref = l.parameters()[12];
    for (Eigen::Index f = 0; f < 12; ++f) ref += l.parameters()[static_cast<std::size_t>(f)] * x(r, f);
    CHECK(lv[static_cast<std::size_t>(r)] == doctest::Approx(ref));
  }
}

TEST_CASE("loss gradients match finite differences") {
  struct Case {
    ApproximatorKind kind;
    HeadKind head;
    LossKind loss;
  };
  const Case cases[] = {{ApproximatorKind::Linear, HeadKind::Histogram, LossKind::HLGaussCE},
                        {ApproximatorKind::Mlp, HeadKind::Histogram, LossKind::HLGaussCE},
                        {ApproximatorKind::Linear, HeadKind::Histogram, LossKind::MSE},
                        {ApproximatorKind::Mlp, HeadKind::Scalar, LossKind::MSE}};
  std::uint64_t seed = 10;
  for (const Case& cs : cases) {
    QArchitecture arch;
    arch.kind = cs.kind;
    arch.head = cs.head;
    arch.hidden = {6, 5};
    const QFunction q(arch, HistogramCodec{}, ++seed);
    const RowMatrix x = random_inputs(4, seed);
    const std::vector<double> t{-3.0, -40.0, -2.0, -700.0};
    const std::vector<double> w{1.0, 0.5, 0.25, 1.0};
    CHECK(fd_max_relative_error(q, x, t, w, cs.loss) <= 1e-4);
  }
}

TEST_CASE("cross-entropy at the target distribution") {
  QArchitecture arch;
  arch.kind = ApproximatorKind::Linear;
  QFunction q(arch, HistogramCodec{}, 0);
  const double target = -37.0;
  const auto enc = q.codec().encode(target);
  auto& params = q.parameters();
  std::fill(params.begin(), params.end(), 0.0);
  double entropy = 0.0;
  for (std::size_t i = 0; i < enc.size(); ++i) {
    params[12 * 18 + i] = std::log(std::max(enc[i], 1e-300));
    if (enc[i] > 0) entropy -= enc[i] * std::log(enc[i]);
  }
  const LossResult r = loss_and_gradient(q, random_inputs(3, 1), {target, target, target}, {1, 1, 1},
                                         LossKind::HLGaussCE);
  CHECK(r.loss == doctest::Approx(entropy).epsilon(1e-9));
  for (double g : r.gradient) CHECK(std::abs(g) < 1e-9);
}

TEST_CASE("loss errors") {
  QArchitecture scalar;
  scalar.head = HeadKind::Scalar;
  scalar.hidden = {4};
  const QFunction s(scalar, HistogramCodec{}, 0);
  const RowMatrix x = random_inputs(2, 0);
  CHECK(testing::error_code_of([&] { loss_and_gradient(s, x, {-1, -1}, {1, 1}, LossKind::HLGaussCE); }) ==
        ErrorCode::InvalidArgument);
  CHECK(testing::error_code_of([&] { loss_and_gradient(s, x, {-1}, {1, 1}, LossKind::MSE); }) ==
        ErrorCode::InvalidArgument);
  QFunction broken = s;
  broken.parameters()[0] = std::nan("");
  CHECK(testing::error_code_of([&] { loss_and_gradient(broken, x, {-1, -1}, {1, 1}, LossKind::MSE); }) ==
        ErrorCode::NumericFailure);
}

namespace {

SubtreeRecord leaf_record(std::size_t at) {
  SubtreeRecord r;
  r.selected_at = at;
  r.minus_fathomed = r.plus_fathomed = true;
  r.nodes_added_below = 2;
  return r;
}

}  // namespace

TEST_CASE("one-step targets") {
  TargetConfig cfg;
  cfg.reward_per_transition = -1.0;
  std::vector<SubtreeRecord> recs{leaf_record(0)};
  const FrontierValue four = [](std::size_t) { return -4.0; };
  CHECK(target_1step(recs, 0, four, cfg) == -2.0);
  cfg.k = 3;
  CHECK(target_kstep(recs, 0, four, cfg) == -2.0);  // fathoms in one step: no bootstrap

  recs = {leaf_record(0), leaf_record(1)};
  recs[0].child_plus_record = 1;
  recs[0].plus_fathomed = false;
  cfg.k = 1;
  CHECK(target_1step(recs, 0, four, cfg) == -6.0);
  CHECK(target_kstep(recs, 0, four, cfg) == -6.0);
  CHECK(target_treemdp_kstep(recs, 0, four, cfg, 1) == -6.0);
}

TEST_CASE("TreeMDP target on a perfect depth-2 tree") {
  std::vector<SubtreeRecord> recs{leaf_record(0), leaf_record(1), leaf_record(2)};
  recs[0].child_minus_record = 1;
  recs[0].child_plus_record = 2;
  recs[0].minus_fathomed = recs[0].plus_fathomed = false;
  TargetConfig cfg;
  cfg.reward_per_transition = -1.0;
  const FrontierValue unused = [](std::size_t) -> double { FAIL("no bootstrap expected"); return 0; };
  CHECK(target_treemdp_kstep(recs, 0, unused, cfg, 2) == -6.0);
}

TEST_CASE("exact values reproduce the realized subtree size") {
  TargetConfig cfg;
  cfg.reward_per_transition = -1.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const MilpInstance inst = generate(preset_spec("small", "setcover", seed + 40));
    RandomBranching policy;
    EnvConfig env;
    const Episode ep = rollout(inst, policy, env, seed);
    const auto recs = subtree_records(ep);
    const FrontierValue exact = [&](std::size_t r) { return -static_cast<double>(recs[r].nodes_added_below); };
    for (std::size_t r = 0; r < recs.size(); ++r) {
      const double truth = -static_cast<double>(recs[r].nodes_added_below);
      for (std::size_t k : {1, 2, 3, 5}) {
        cfg.k = k;
        CHECK(target_kstep(recs, r, exact, cfg) == truth);
        CHECK(target_treemdp_kstep(recs, r, exact, cfg, k) == truth);
      }
    }
  }
}

TEST_CASE("frontier bookkeeping") {
  const MilpInstance inst = generate(preset_spec("small", "indset", 2));
  RandomBranching policy;
  const Episode ep = rollout(inst, policy, EnvConfig{}, 2);
  const auto recs = subtree_records(ep);
  for (std::size_t r = 0; r < recs.size(); ++r) {
    for (std::size_t k = 1; k <= 4; ++k) {
      const Frontier b = bbmdp_frontier(recs, r, k);
      const Frontier t = treemdp_frontier(recs, r, k);
      // A binary tree with e internal nodes has e + 1 leaves.
      CHECK(b.open.size() + b.fathomed == b.expansions + 1);
      CHECK(t.open.size() + t.fathomed == t.expansions + 1);
      CHECK(b.expansions <= k);
      CHECK(t.expansions <= (std::size_t{1} << k) - 1);
    }
  }
}

TEST_CASE("double-Q frontier value") {
  QArchitecture arch;
  arch.hidden = {8};
  const QFunction online(arch, HistogramCodec{}, 1);
  const QFunction target(arch, HistogramCodec{}, 2);
  const MilpInstance inst = generate(preset_spec("small", "setcover", 3));
  RandomBranching policy;
  const Episode ep = rollout(inst, policy, EnvConfig{}, 0);
  const auto recs = subtree_records(ep, true);
  const FrontierValue single = greedy_frontier_value(recs, online);
  const FrontierValue twin = greedy_frontier_value(recs, online, &target);
  for (std::size_t r = 0; r < recs.size(); ++r) {
    const auto vo = online.values(recs[r].features);
    const auto vt = target.values(recs[r].features);
    std::size_t best = 0;
    for (std::size_t i = 1; i < vo.size(); ++i)
      if (vo[i] > vo[best]) best = i;
    CHECK(single(r) == vo[best]);
    CHECK(twin(r) == vt[best]);
  }
}

TEST_CASE("sum tree agrees with prefix sums") {
  SplitMix64 rng(5);
  SumTree tree(37);
  std::vector<double> v(37, 0.0);
  for (int round = 0; round < 200; ++round) {
    const std::size_t i = rng.below(37);
    v[i] = static_cast<double>(rng.below(6));  // integers keep sums exact
    tree.set(i, v[i]);
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    CHECK(tree.total() == total);
    if (total == 0) continue;
    const double mass = static_cast<double>(rng.below(static_cast<std::uint64_t>(total))) + 0.5;
    double prefix = 0;
    std::size_t expect = 0;
    for (; expect < v.size(); ++expect) {
      if (mass < prefix + v[expect]) break;
      prefix += v[expect];
    }
    CHECK(tree.find(mass) == expect);
  }
}

TEST_CASE("prioritized replay") {
  ReplayConfig cfg;
  cfg.capacity = 8;
  cfg.min_fill = 4;
  PrioritizedReplay buf(cfg);
  SplitMix64 rng(1);
  CHECK(testing::error_code_of([&] { buf.sample(2, 0.4, rng); }) == ErrorCode::PreconditionViolated);
  for (int i = 0; i < 4; ++i) buf.add({});
  CHECK(buf.ready());
  for (std::size_t i = 0; i < 4; ++i) CHECK(buf.priority(i) == 1.0);
  buf.update({0, 1}, {3.0, -0.5});
  CHECK(buf.priority(0) == doctest::Approx(3.001));
  CHECK(buf.priority(1) == doctest::Approx(0.501));
  buf.add({});
  CHECK(buf.priority(4) == doctest::Approx(3.001));  // new items take the running maximum

  // Empirical sampling frequencies follow p^alpha.
  std::vector<double> hits(buf.size(), 0.0);
  double max_w = 0;
  for (int round = 0; round < 4000; ++round) {
    const auto s = buf.sample(5, 0.4, rng);
    for (std::size_t b = 0; b < 5; ++b) {
      hits[s.indices[b]] += 1;
      max_w = std::max(max_w, s.weights[b]);
    }
    CHECK(*std::max_element(s.weights.begin(), s.weights.end()) == 1.0);
  }
  double z = 0;
  for (std::size_t i = 0; i < buf.size(); ++i) z += std::pow(buf.priority(i), 0.6);
  for (std::size_t i = 0; i < buf.size(); ++i) {
    CHECK(hits[i] / 20000.0 == doctest::Approx(std::pow(buf.priority(i), 0.6) / z).epsilon(0.05));
  }
  CHECK(buf.beta(0) == 0.4);
  CHECK(buf.beta(50000) == doctest::Approx(0.7));
  CHECK(buf.beta(1000000) == 1.0);

  for (int i = 0; i < 6; ++i) buf.add({});
  CHECK(buf.size() == 8);  // ring buffer overwrites the oldest entries
}

TEST_CASE("episode feature store keeps rows") {
  FeatureMatrix fm;
  fm.candidates = {3, 7};
  for (int i = 0; i < 24; ++i) fm.data.push_back(0.25 * i);
  EpisodeFeatures store;
  const std::size_t id = store.add(fm);
  const RowMatrix m = store.matrix(id);
  CHECK(m.rows() == 2);
  CHECK(m(1, 3) == 0.25 * 15);
  RowMatrix out(1, 12);
  store.copy_row(id, 1, out, 0);
  CHECK(out(0, 11) == 0.25 * 23);
}
