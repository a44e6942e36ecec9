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

#ifndef PCTL_TRAINER_H_
#define PCTL_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "pctl/label_engine.h"
#include "pctl/loss.h"
#include "pctl/model.h"
#include "pctl/synth.h"
#include "pctl/user_state.h"

namespace pctl {

// What the model is trained on.
//  regression      L_reg only (the raw-magnitude baseline)
//  single          BCE against one pool draw (verification only)
//  raw_regression  squared error on y / raw_scale, no log transform
//  multi           BCE against the multi-sample label
//  value_weighted  BCE against the value-weighted label
//  bootstrapped    L_reg + lambda * BCE against the prediction-space label;
//                  the regression head plays the prior model
//  cotrain         L_reg + lambda * BCE against the multi-sample label
enum class Variant {
  kRegression,
  kRawRegression,
  kSingle,
  kMulti,
  kValueWeighted,
  kBootstrapped,
  kCotrain,
};

std::string_view VariantName(Variant v);
std::optional<Variant> ParseVariant(std::string_view name);

// Which signal the percentile head contrasts against the pool.
enum class PercentileTarget { kMagnitude, kBinary };

std::string_view TargetName(PercentileTarget t);
std::optional<PercentileTarget> ParseTarget(std::string_view name);

struct TrainConfig {
  Variant variant = Variant::kMulti;
  PercentileTarget target = PercentileTarget::kMagnitude;
  std::size_t pool_capacity = 50;
  std::uint64_t gate_threshold = 10;
  double lambda = 1.0;
  double learning_rate = 0.005;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  double clamp_eps = kDefaultClampEps;
  // Divisor for raw_regression targets; 0 means the mean magnitude of the
  // training stream.
  double raw_scale = 0.0;
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden = {32};

  void Validate() const;
  bool uses_regression() const;
  bool uses_percentile() const;
};

// One line of the training log.
struct TrainRecord {
  std::size_t step = 0;
  UserId user = 0;
  bool gate_open = false;
  std::optional<double> label;  // absent when no percentile label was built
  double target = 0.0;          // value contrasted against the pool
  double y_hat = 0.0;
  double p_hat = 0.0;
  double loss = 0.0;
  double reg_loss = 0.0;
  double pct_loss = 0.0;
  double running_loss = 0.0;  // mean total loss over the epoch so far
};

struct LossBreakdown {
  double total = 0.0;
  double reg = 0.0;
  double pct = 0.0;
  Upstream upstream;
};

// Loss for one instance given the configured variant. The label is a plain
// value, so nothing flows back through whatever produced it.
LossBreakdown ComputeLoss(const TrainConfig& config, const Prediction& pred,
                          double magnitude, const ContrastiveLabel& label);

// Streaming trainer holding the model, the per-user store and the log.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);
  Trainer(TrainConfig config, DualHeadModel model);

  // forward, gate on the pre-insert counter, label from the pre-insert pool,
  // loss, backward + SGD, then insert (target, pre-step y_hat).
  TrainRecord Step(const Interaction& r);

  // Starts a new pass: empties the store, keeps the model.
  void ResetStore(std::uint64_t epoch);

  const TrainConfig& config() const { return config_; }
  const DualHeadModel& model() const { return model_; }
  const StateStore& store() const { return store_; }

 private:
  ContrastiveLabel BuildLabel(const UserState& state, double target,
                              double y_hat);

  TrainConfig config_;
  DualHeadModel model_;
  StateStore store_;
  std::mt19937_64 label_rng_;
  std::size_t step_ = 0;
  std::size_t epoch_steps_ = 0;
  double epoch_loss_sum_ = 0.0;
};

struct TrainResult {
  DualHeadModel model;
  StateStore store;
  std::vector<TrainRecord> log;
};

// Checks feature dimensions and timestamp order up front, then folds Step
// over the stream for config.epochs passes.
TrainResult Train(std::span<const Interaction> stream, const TrainConfig& config);

void WriteTrainLog(std::ostream& out, std::span<const TrainRecord> log);

}  // namespace pctl

#endif  // PCTL_TRAINER_H_
