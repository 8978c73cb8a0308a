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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bbmdp/codec.hpp"
#include "bbmdp/features.hpp"

namespace bbmdp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ApproximatorKind { Linear, Mlp };
enum class HeadKind { Histogram, Scalar };

struct QArchitecture {
  ApproximatorKind kind = ApproximatorKind::Mlp;
  std::vector<std::size_t> hidden{64, 64};  // ignored for Linear
  HeadKind head = HeadKind::Histogram;
  std::size_t input_dim = kNumFeatures;

  std::string to_json() const;
  static QArchitecture from_json(const std::string& text);

  friend bool operator==(const QArchitecture&, const QArchitecture&) = default;
};

/// Activations kept by a forward pass for the backward pass.
struct ForwardCache {
  std::vector<RowMatrix> activations;  // [input, hidden..., raw output]
};

/// Per-candidate action-value model. Each layer stores a row-major weight
/// block (out x in) followed by its bias in the flat parameter vector.
class QFunction {
 public:
  QFunction() = default;
  QFunction(QArchitecture arch, HistogramCodec codec, std::uint64_t seed);

  const QArchitecture& architecture() const { return arch_; }
  const HistogramCodec& codec() const { return codec_; }
  std::size_t input_dim() const { return arch_.input_dim; }
  std::size_t output_dim() const { return layer_sizes_.back(); }
  std::size_t parameter_count() const { return params_.size(); }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  /// Raw outputs (logits or scalar), one row per input row.
  RowMatrix forward(const RowMatrix& x, ForwardCache* cache = nullptr) const;
  /// Accumulates dL/dtheta into `grad` given dL/d(raw outputs).
  void backward(const ForwardCache& cache, const RowMatrix& d_out, std::vector<double>& grad) const;

  /// Decoded scalar value of each row of raw outputs.
  std::vector<double> decode_outputs(const RowMatrix& out) const;
  std::vector<double> values(const RowMatrix& x) const;
  std::vector<double> values(const FeatureMatrix& fm) const;

 private:
  QArchitecture arch_;
  HistogramCodec codec_;
  std::vector<std::size_t> layer_sizes_;
  std::vector<std::size_t> offsets_;  // start of each layer's weights
  std::vector<double> params_;
  std::vector<double> bin_values_;
};

RowMatrix to_matrix(const FeatureMatrix& fm);

/// Row-wise softmax with max subtraction.
RowMatrix softmax_rows(const RowMatrix& logits);

}  // namespace bbmdp
