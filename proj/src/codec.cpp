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

#include "bbmdp/codec.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "bbmdp/error.hpp"

namespace bbmdp {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void HistogramCodec::validate() const {
  if (m_bins < 2) throw Error(ErrorCode::InvalidArgument, "codec needs at least two bins");
  if (!(psi_max > psi_min)) throw Error(ErrorCode::InvalidArgument, "codec needs psi_max > psi_min");
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "codec sigma must be positive");
}

std::vector<double> HistogramCodec::bin_values() const {
  std::vector<double> v(m_bins);
  for (std::size_t i = 0; i < m_bins; ++i) v[i] = -std::exp2(center(i));
  return v;
}

double HistogramCodec::psi(double value) const {
  const double u = std::log2(std::max(-value, std::exp2(psi_min)));
  return std::clamp(u, psi_min, psi_max);
}

std::vector<double> HistogramCodec::encode(double value) const {
  if (!(value <= 0.0)) throw Error(ErrorCode::InvalidArgument, "encode needs a non-positive value");
  const double u = psi(value);
  std::vector<double> cdf(m_bins + 1);
  for (std::size_t i = 0; i <= m_bins; ++i) cdf[i] = normal_cdf((edge(i) - u) / sigma);
  // Tail mass folds into the boundary bins, so the outer CDF values are 0 and 1.
  cdf.front() = 0.0;
  cdf.back() = 1.0;
  std::vector<double> p(m_bins);
  for (std::size_t i = 0; i < m_bins; ++i) p[i] = cdf[i + 1] - cdf[i];
  return p;
}

double HistogramCodec::decode(std::span<const double> probs) const {
  if (probs.size() != m_bins) {
    throw Error(ErrorCode::InvalidArgument, "distribution has " + std::to_string(probs.size()) +
                                                " entries, codec has " + std::to_string(m_bins));
  }
  double total = 0.0, z = 0.0;
  for (std::size_t i = 0; i < m_bins; ++i) {
    if (!(probs[i] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative probability");
    total += probs[i];
    z += probs[i] * -std::exp2(center(i));
  }
  if (std::abs(total - 1.0) > 1e-6) throw Error(ErrorCode::InvalidArgument, "distribution does not sum to 1");
  return z;
}

std::string HistogramCodec::to_json() const {
  nlohmann::ordered_json j;
  j["m_bins"] = m_bins;
  j["psi_min"] = psi_min;
  j["psi_max"] = psi_max;
  j["sigma"] = sigma;
  return j.dump();
}

HistogramCodec HistogramCodec::from_json(const std::string& text) {
  HistogramCodec c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.m_bins = j.value("m_bins", c.m_bins);
    c.psi_min = j.value("psi_min", c.psi_min);
    c.psi_max = j.value("psi_max", c.psi_max);
    c.sigma = j.value("sigma", c.sigma);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, e.what());
  }
  c.validate();
  return c;
}

}  // namespace bbmdp
