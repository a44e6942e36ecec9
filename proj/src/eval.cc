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

#include "pctl/eval.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "json.hpp"
#include "pctl/errors.h"
#include "pctl/rng.h"

namespace pctl {

namespace {

// 1 if the pair is ordered like the truth, 0 if reversed, 0.5 on a score tie.
double PairCredit(double score_hi, double score_lo) {
  if (score_hi > score_lo) return 1.0;
  if (score_hi < score_lo) return 0.0;
  return 0.5;
}

struct UserSlice {
  std::vector<double> scores;
  std::vector<double> truth;
};

std::map<UserId, UserSlice> GroupByUser(std::span<const ScoredRecord> records) {
  std::map<UserId, UserSlice> users;
  for (const ScoredRecord& r : records) {
    UserSlice& s = users[r.user];
    s.scores.push_back(r.score);
    s.truth.push_back(r.truth);
  }
  return users;
}

}  // namespace

std::optional<double> UserAuc(std::span<const double> scores,
                              std::span<const double> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with mid-ranks for tied scores.
  double positives = 0.0;
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] > 0.5) {
        positives += 1.0;
        rank_sum += mid_rank;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) return std::nullopt;
  return (rank_sum - positives * (positives + 1.0) / 2.0) /
         (positives * negatives);
}

std::optional<double> UserRegAuc(std::span<const double> scores,
                                 std::span<const double> truth,
                                 std::size_t max_pairs, std::uint64_t seed) {
  if (scores.size() != truth.size()) {
    throw ValidationError("scores and truth differ in length");
  }
  const std::size_t n = truth.size();
  // Distinct-truth pairs = all pairs minus pairs inside tie groups.
  std::vector<double> sorted(truth.begin(), truth.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t distinct = static_cast<std::uint64_t>(n) * (n - (n > 0)) / 2;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const std::uint64_t g = j - i;
    distinct -= g * (g - 1) / 2;
    i = j;
  }
  if (distinct == 0) return std::nullopt;

  double credit = 0.0;
  auto score_pair = [&](std::size_t a, std::size_t b) {
    return truth[a] > truth[b] ? PairCredit(scores[a], scores[b])
                               : PairCredit(scores[b], scores[a]);
  };
  if (max_pairs == 0 || distinct <= max_pairs) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (truth[a] != truth[b]) credit += score_pair(a, b);
      }
    }
    return credit / static_cast<double>(distinct);
  }
  // Rejection sampling of unordered pairs is uniform over distinct-truth
  // pairs; distinct > max_pairs >= 1 keeps the acceptance rate positive.
  SplitMix64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t taken = 0;
  while (taken < max_pairs) {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    if (a == b || truth[a] == truth[b]) continue;
    credit += score_pair(a, b);
    ++taken;
  }
  return credit / static_cast<double>(max_pairs);
}

MetricResult Uauc(std::span<const ScoredRecord> records) {
  MetricResult out;
  double sum = 0.0;
  for (const auto& [user, slice] : GroupByUser(records)) {
    const auto auc = UserAuc(slice.scores, slice.truth);
    if (!auc) {
      ++out.skipped;
      continue;
    }
    sum += *auc;
    ++out.users;
  }
  if (out.users > 0) out.value = sum / static_cast<double>(out.users);
  return out;
}

MetricResult UregAuc(std::span<const ScoredRecord> records,
                     std::size_t pairs_per_user, std::uint64_t seed) {
  MetricResult out;
  double sum = 0.0;
  for (const auto& [user, slice] : GroupByUser(records)) {
    const auto v =
        UserRegAuc(slice.scores, slice.truth, pairs_per_user, MixSeed(seed, user));
    if (!v) {
      ++out.skipped;
      continue;
    }
    sum += *v;
    ++out.users;
  }
  if (out.users > 0) out.value = sum / static_cast<double>(out.users);
  return out;
}

std::string_view MetricName(MetricKind kind) {
  return kind == MetricKind::kUauc ? "UAUC" : "URegAUC";
}

namespace {

MetricResult Evaluate(const TargetRun& run, std::string_view cohort,
                      const EvalOptions& options) {
  std::vector<ScoredRecord> subset;
  for (const ScoredRecord& r : run.records) {
    if (cohort == "all" || r.cohort == cohort) subset.push_back(r);
  }
  return run.metric == MetricKind::kUauc
             ? Uauc(subset)
             : UregAuc(subset, options.pairs_per_user, options.seed);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::vector<EvalRow> CohortReport(const TargetRun& run, const TargetRun* baseline,
                                  std::span<const std::string> cohorts,
                                  const EvalOptions& options) {
  if (baseline != nullptr) {
    if (baseline->records.size() != run.records.size() ||
        baseline->metric != run.metric) {
      throw ValidationError("baseline run for '" + run.target +
                            "' does not cover the same records");
    }
    for (std::size_t i = 0; i < run.records.size(); ++i) {
      const ScoredRecord& a = run.records[i];
      const ScoredRecord& b = baseline->records[i];
      if (a.user != b.user || a.truth != b.truth || a.cohort != b.cohort) {
        throw ValidationError("baseline run for '" + run.target +
                              "' differs at record " + std::to_string(i));
      }
    }
  }
  std::vector<std::string> groups = {"all"};
  groups.insert(groups.end(), cohorts.begin(), cohorts.end());
  std::vector<EvalRow> rows;
  for (const std::string& cohort : groups) {
    EvalRow row;
    row.target = run.target;
    row.metric = run.metric;
    row.cohort = cohort;
    row.result = Evaluate(run, cohort, options);
    if (baseline != nullptr && row.result.value) {
      const MetricResult base = Evaluate(*baseline, cohort, options);
      if (base.value) row.delta_vs_baseline = *row.result.value - *base.value;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void EvalReport::WriteCsv(std::ostream& out) const {
  out << "target,metric,cohort,value,users,skipped,delta_vs_baseline\n";
  for (const EvalRow& r : rows) {
    out << r.target << ',' << MetricName(r.metric) << ',' << r.cohort << ','
        << (r.result.value ? FormatDouble(*r.result.value) : "EmptyCohort")
        << ',' << r.result.users << ',' << r.result.skipped << ','
        << (r.delta_vs_baseline ? FormatDouble(*r.delta_vs_baseline) : "")
        << '\n';
  }
}

void EvalReport::WriteJson(std::ostream& out) const {
  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const EvalRow& r : rows) {
    nlohmann::ordered_json j;
    j["target"] = r.target;
    j["metric"] = MetricName(r.metric);
    j["cohort"] = r.cohort;
    j["value"] = r.result.value ? nlohmann::ordered_json(*r.result.value) : nullptr;
    j["status"] = r.result.value ? "ok" : "EmptyCohort";
    j["users"] = r.result.users;
    j["skipped"] = r.result.skipped;
    j["delta_vs_baseline"] = r.delta_vs_baseline
                                 ? nlohmann::ordered_json(*r.delta_vs_baseline)
                                 : nullptr;
    rows_json.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["rows"] = std::move(rows_json);
  out << doc.dump(2) << '\n';
}

const EvalRow* EvalReport::Find(std::string_view target,
                                std::string_view cohort) const {
  for (const EvalRow& r : rows) {
    if (r.target == target && r.cohort == cohort) return &r;
  }
  return nullptr;
}

}  // namespace pctl
