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
#include <string>
#include <vector>

namespace bbmdp {

/// HL-Gauss histogram over psi(z) = log2(-z). Bins split [psi_min, psi_max]
/// into m_bins equal parts; a scalar is encoded as the mass a Gaussian of
/// width sigma centred at psi(z) puts on each bin, with the mass beyond either
/// end folded into the boundary bin. Decoding maps each centre back through
/// psi^-1(zeta) = -2^zeta.
struct HistogramCodec {
  std::size_t m_bins = 18;
  double psi_min = -1.0;
  double psi_max = 16.0;
  double sigma = 0.75;

  void validate() const;

  double width() const { return (psi_max - psi_min) / static_cast<double>(m_bins); }
  double edge(std::size_t i) const { return psi_min + static_cast<double>(i) * width(); }
  double center(std::size_t i) const { return psi_min + (static_cast<double>(i) + 0.5) * width(); }
  /// -2^center(i) for every bin.
  std::vector<double> bin_values() const;

  /// psi of a non-positive value, clamped to [psi_min, psi_max].
  double psi(double value) const;

  /// Throws Error(InvalidArgument) for value > 0.
  std::vector<double> encode(double value) const;
  /// Throws Error(InvalidArgument) for a malformed distribution.
  double decode(std::span<const double> probs) const;

  std::string to_json() const;
  static HistogramCodec from_json(const std::string& text);

  friend bool operator==(const HistogramCodec&, const HistogramCodec&) = default;
};

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace bbmdp
