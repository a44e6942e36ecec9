/*
 * Copyright 2026 The pctl Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PCTL_EVAL_H_
#define PCTL_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pctl/user_state.h"

namespace pctl {

// One scored (user, item) pair. `truth` is a 0/1 label for UAUC and a
// magnitude for URegAUC.
struct ScoredRecord {
  UserId user = 0;
  double score = 0.0;
  double truth = 0.0;
  std::string cohort;
};

// Mean of per-user values. `value` is empty when no user qualified
// (an empty cohort), never NaN.
struct MetricResult {
  std::optional<double> value;
  std::size_t users = 0;
  std::size_t skipped = 0;

  bool empty_cohort() const { return !value.has_value(); }
};

// ROC-AUC of one user's scores against 0/1 labels, tied scores earning half
// credit. Empty when the user lacks a positive or a negative.
std::optional<double> UserAuc(std::span<const double> scores,
                              std::span<const double> labels);

// Fraction of distinct-truth pairs ordered the same way by the scores, ties
// in score earning half credit. At most `max_pairs` pairs are sampled
// uniformly; when the user has no more distinct pairs than that, all are
// enumerated. Empty when no distinct-truth pair exists.
std::optional<double> UserRegAuc(std::span<const double> scores,
                                 std::span<const double> truth,
                                 std::size_t max_pairs, std::uint64_t seed);

MetricResult Uauc(std::span<const ScoredRecord> records);

inline constexpr std::size_t kDefaultPairsPerUser = 100;

MetricResult UregAuc(std::span<const ScoredRecord> records,
                     std::size_t pairs_per_user = kDefaultPairsPerUser,
                     std::uint64_t seed = 0);

enum class MetricKind { kUauc, kURegAuc };

std::string_view MetricName(MetricKind kind);

struct EvalRow {
  std::string target;
  MetricKind metric = MetricKind::kUauc;
  std::string cohort;  // "all" for the whole population
  MetricResult result;
  std::optional<double> delta_vs_baseline;
};

struct EvalReport {
  std::vector<EvalRow> rows;

  void WriteCsv(std::ostream& out) const;
  void WriteJson(std::ostream& out) const;
  const EvalRow* Find(std::string_view target, std::string_view cohort) const;
};

struct TargetRun {
  std::string target;
  MetricKind metric = MetricKind::kUauc;
  std::vector<ScoredRecord> records;
};

struct EvalOptions {
  std::size_t pairs_per_user = kDefaultPairsPerUser;
  std::uint64_t seed = 0;
};

// Rows for the whole run ("all") and each listed cohort, with deltas against
// the baseline run when one is given. Both runs must score the same records.
std::vector<EvalRow> CohortReport(const TargetRun& run, const TargetRun* baseline,
                                  std::span<const std::string> cohorts,
                                  const EvalOptions& options = {});

}  // namespace pctl

#endif  // PCTL_EVAL_H_
