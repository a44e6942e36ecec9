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

#ifndef PCTL_EXPERIMENT_H_
#define PCTL_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pctl/eval.h"
#include "pctl/model.h"
#include "pctl/synth.h"
#include "pctl/trainer.h"

namespace pctl {

enum class ScoreHead { kAuto, kRegression, kPercentile };

struct EvalSettings {
  std::size_t pairs_per_user = kDefaultPairsPerUser;
  std::size_t oracle_draws = PercentileOracle::kDefaultDraws;
  ScoreHead score_head = ScoreHead::kAuto;
};

// Everything an experiment needs, read from one JSON file. Every key is
// optional; unknown keys are rejected.
struct ExperimentConfig {
  PopulationConfig population;
  TrainConfig train;
  EvalSettings eval;
  bool baseline = true;  // also train a regression twin on the same stream
  Variant baseline_variant = Variant::kRawRegression;
  // Step size for the twin. Raw squared error has a much larger gradient
  // scale than the percentile losses, so it gets its own rate.
  double baseline_learning_rate = 0.0005;
  std::uint64_t seed = 11;
  std::string output_dir = "out";

  // Sets the seed everywhere it is consumed.
  void SetSeed(std::uint64_t s);
  nlohmann::ordered_json ToJson() const;
  std::uint64_t Hash() const;
};

ExperimentConfig ParseConfig(const nlohmann::json& doc);
ExperimentConfig LoadConfig(const std::string& path);

struct CohortSummary {
  std::string name;
  std::size_t users = 0;
  std::size_t interactions = 0;
  double mean_magnitude = 0.0;
  double positive_rate = 0.0;
};

struct SimulateSummary {
  std::size_t interactions = 0;
  std::size_t holdout = 0;
  std::vector<CohortSummary> cohorts;
};

// Writes stream.jsonl, holdout.jsonl and oracle.csv to out_dir.
SimulateSummary CmdSimulate(const ExperimentConfig& config,
                            const std::string& out_dir, std::ostream& log);

struct TrainSummary {
  std::size_t steps = 0;
  std::size_t gated_steps = 0;
  double final_running_loss = 0.0;
};

// Writes model.ckpt, state.snap, train_log.jsonl and, with the baseline
// toggle, baseline.ckpt to out_dir.
TrainSummary CmdTrain(const ExperimentConfig& config,
                      const std::string& stream_path, const std::string& out_dir,
                      std::ostream& log);

// Scores every interaction in stream_path and writes report.csv and
// report.json to out_dir.
EvalReport CmdEval(const ExperimentConfig& config, const std::string& checkpoint,
                   const std::string& stream_path,
                   const std::optional<std::string>& baseline_checkpoint,
                   const std::string& out_dir, std::ostream& log);

// Score for one interaction from the configured head.
ScoreHead ResolveScoreHead(const ExperimentConfig& config);

// Builds the report rows (y / b / affinity targets per cohort).
EvalReport BuildReport(const ExperimentConfig& config, const DualHeadModel& model,
                       ScoreHead head, const DualHeadModel* baseline,
                       const std::vector<Interaction>& stream);

std::vector<Interaction> LoadStream(const std::string& path);

}  // namespace pctl

#endif  // PCTL_EXPERIMENT_H_
