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
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bbmdp {

/// Plain geometric mean; every value must be positive.
double geometric_mean(const std::vector<double>& values);
/// exp(mean(log(v + shift))) - shift
double shifted_geometric_mean(const std::vector<double>& values, double shift);

struct EvalRow {
  std::string instance;
  std::string family;
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  std::size_t steps = 0;
  bool solved = false;
  std::optional<double> objective;
  double gap = 0.0;  // gub minus the smallest open LP bound; 0 when solved, +inf without incumbent
  double seconds = 0.0;
};

enum class RankBy { Seconds, Nodes };

struct PolicyAggregate {
  std::string policy;
  double geomean_nodes = 0.0;
  double geomean_seconds = 0.0;
  std::size_t solved = 0;
  std::size_t cells = 0;
  std::size_t wins_nodes = 0;
  double mean_rank_nodes = 0.0;
  std::size_t wins_seconds = 0;
  double mean_rank_seconds = 0.0;
  std::optional<double> normalized_score;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<PolicyAggregate> aggregates;  // in first-appearance policy order
  std::optional<std::string> reference_policy;
};

struct WinsRanks {
  std::size_t wins = 0;
  double mean_rank = 0.0;
};

/// Per (instance, seed) cell: solved runs first ordered by `by`, unsolved runs
/// after them by gap; ties by node count, then policy name.
std::map<std::string, WinsRanks> wins_and_ranks(const std::vector<EvalRow>& rows, RankBy by = RankBy::Seconds);

/// Per family 100 * geomean(policy nodes) / geomean(reference nodes), then the
/// arithmetic mean over families. Throws Error(InvalidArgument) when the
/// reference policy has no rows.
std::map<std::string, double> normalized_score(const std::vector<EvalRow>& rows, const std::string& reference);

/// Fills report.aggregates from report.rows.
void aggregate(EvalReport& report);

/// One line per row; wall-clock seconds is the last column.
std::string report_csv(const EvalReport& report);
/// Aggregates as JSON; keys of wall-clock derived values contain "seconds".
std::string report_json(const EvalReport& report);

}  // namespace bbmdp
