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

#include "bbmdp/qfunction.hpp"

#include <cmath>

#include <json.hpp>

#include "bbmdp/error.hpp"
#include "bbmdp/rng.hpp"

namespace bbmdp {

std::string QArchitecture::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind == ApproximatorKind::Linear ? "linear" : "mlp";
  j["hidden"] = hidden;
  j["head"] = head == HeadKind::Histogram ? "histogram" : "scalar";
  j["input_dim"] = input_dim;
  return j.dump();
}

QArchitecture QArchitecture::from_json(const std::string& text) {
  QArchitecture a;
  try {
    const auto j = nlohmann::json::parse(text);
    const std::string kind = j.value("kind", std::string("mlp"));
    if (kind == "linear") {
      a.kind = ApproximatorKind::Linear;
    } else if (kind == "mlp") {
      a.kind = ApproximatorKind::Mlp;
    } else {
      throw Error(ErrorCode::SchemaViolation, "unknown approximator '" + kind + "'");
    }
    a.hidden = j.value("hidden", a.hidden);
    const std::string head = j.value("head", std::string("histogram"));
    if (head == "histogram") {
      a.head = HeadKind::Histogram;
    } else if (head == "scalar") {
      a.head = HeadKind::Scalar;
    } else {
      throw Error(ErrorCode::SchemaViolation, "unknown head '" + head + "'");
    }
    a.input_dim = j.value("input_dim", a.input_dim);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, e.what());
  }
  return a;
}

QFunction::QFunction(QArchitecture arch, HistogramCodec codec, std::uint64_t seed)
    : arch_(std::move(arch)), codec_(codec) {
  codec_.validate();
  if (arch_.input_dim == 0) throw Error(ErrorCode::InvalidArgument, "input_dim must be positive");
  layer_sizes_.push_back(arch_.input_dim);
  if (arch_.kind == ApproximatorKind::Mlp) {
    for (std::size_t h : arch_.hidden) {
      if (h == 0) throw Error(ErrorCode::InvalidArgument, "hidden layer of width 0");
      layer_sizes_.push_back(h);
    }
  }
  layer_sizes_.push_back(arch_.head == HeadKind::Histogram ? codec_.m_bins : 1);

  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += layer_sizes_[l + 1] * (layer_sizes_[l] + 1);
  }
  params_.assign(total, 0.0);

  SplitMix64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const std::size_t in = layer_sizes_[l], out = layer_sizes_[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (std::size_t k = 0; k < in * out; ++k) params_[offsets_[l] + k] = rng.uniform(-bound, bound);
  }
  bin_values_ = codec_.bin_values();
}

RowMatrix QFunction::forward(const RowMatrix& x, ForwardCache* cache) const {
  if (static_cast<std::size_t>(x.cols()) != arch_.input_dim) {
    throw Error(ErrorCode::InvalidArgument, "feature width mismatch");
  }
  const std::size_t layers = layer_sizes_.size() - 1;
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(x);
  }
  RowMatrix h = x;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<Eigen::Index>(layer_sizes_[l]);
    const auto out = static_cast<Eigen::Index>(layer_sizes_[l + 1]);
    Eigen::Map<const RowMatrix> w(params_.data() + offsets_[l], out, in);
    Eigen::Map<const Eigen::RowVectorXd> b(params_.data() + offsets_[l] + out * in, out);
    RowMatrix z = h * w.transpose();
    z.rowwise() += b;
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    if (cache) cache->activations.push_back(z);
    h = std::move(z);
  }
  return h;
}

void QFunction::backward(const ForwardCache& cache, const RowMatrix& d_out,
                         std::vector<double>& grad) const {
  if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);
  const std::size_t layers = layer_sizes_.size() - 1;
  RowMatrix delta = d_out;
  for (std::size_t l = layers; l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(layer_sizes_[l]);
    const auto out = static_cast<Eigen::Index>(layer_sizes_[l + 1]);
    const RowMatrix& a_in = cache.activations[l];
    Eigen::Map<RowMatrix> gw(grad.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::RowVectorXd> gb(grad.data() + offsets_[l] + out * in, out);
    gw.noalias() += delta.transpose() * a_in;
    gb += delta.colwise().sum();
    if (l == 0) break;
    Eigen::Map<const RowMatrix> w(params_.data() + offsets_[l], out, in);
    RowMatrix d_in = delta * w;
    // ReLU derivative on the hidden activation feeding this layer.
    delta = d_in.cwiseProduct((a_in.array() > 0.0).cast<double>().matrix());
  }
}

RowMatrix softmax_rows(const RowMatrix& logits) {
  RowMatrix p = logits;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const double mx = p.row(r).maxCoeff();
    p.row(r) = (p.row(r).array() - mx).exp().matrix();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

std::vector<double> QFunction::decode_outputs(const RowMatrix& out) const {
  std::vector<double> v(static_cast<std::size_t>(out.rows()));
  if (arch_.head == HeadKind::Scalar) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) v[r] = out(r, 0);
    return v;
  }
  const RowMatrix p = softmax_rows(out);
  Eigen::Map<const Eigen::VectorXd> centers(bin_values_.data(), static_cast<Eigen::Index>(bin_values_.size()));
  const Eigen::VectorXd z = p * centers;
  for (Eigen::Index r = 0; r < out.rows(); ++r) v[r] = z[r];
  return v;
}

std::vector<double> QFunction::values(const RowMatrix& x) const { return decode_outputs(forward(x)); }

std::vector<double> QFunction::values(const FeatureMatrix& fm) const { return values(to_matrix(fm)); }

RowMatrix to_matrix(const FeatureMatrix& fm) {
  RowMatrix x(static_cast<Eigen::Index>(fm.rows()), static_cast<Eigen::Index>(kNumFeatures));
  for (std::size_t i = 0; i < fm.data.size(); ++i) x.data()[i] = fm.data[i];
  return x;
}

}  // namespace bbmdp
