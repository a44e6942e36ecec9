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

#include "pctl/trainer.h"

#include <cmath>
#include <ostream>
#include <string>

#include "json.hpp"
#include "pctl/errors.h"
#include "pctl/rng.h"

namespace pctl {

namespace {

constexpr std::pair<Variant, std::string_view> kVariantNames[] = {
    {Variant::kRegression, "regression"},
    {Variant::kRawRegression, "raw_regression"},
    {Variant::kSingle, "single"},
    {Variant::kMulti, "multi"},
    {Variant::kValueWeighted, "value_weighted"},
    {Variant::kBootstrapped, "bootstrapped"},
    {Variant::kCotrain, "cotrain"},
};

}  // namespace

std::string_view VariantName(Variant v) {
  for (const auto& [variant, name] : kVariantNames) {
    if (variant == v) return name;
  }
  return "unknown";
}

std::optional<Variant> ParseVariant(std::string_view name) {
  for (const auto& [variant, n] : kVariantNames) {
    if (n == name) return variant;
  }
  return std::nullopt;
}

std::string_view TargetName(PercentileTarget t) {
  return t == PercentileTarget::kMagnitude ? "magnitude" : "binary";
}

std::optional<PercentileTarget> ParseTarget(std::string_view name) {
  if (name == "magnitude") return PercentileTarget::kMagnitude;
  if (name == "binary") return PercentileTarget::kBinary;
  return std::nullopt;
}

void TrainConfig::Validate() const {
  if (pool_capacity < 1) throw ValidationError("train.pool_capacity must be >= 1");
  if (gate_threshold < 1) throw ValidationError("train.gate_threshold must be >= 1");
  if (!(lambda >= 0.0)) throw ValidationError("train.lambda must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw ValidationError("train.learning_rate must be > 0");
  }
  if (epochs < 1) throw ValidationError("train.epochs must be >= 1");
  if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) {
    throw ValidationError("train.clamp_eps must be in (0, 0.5)");
  }
  if (!(raw_scale >= 0.0) || !std::isfinite(raw_scale)) {
    throw ValidationError("train.raw_scale must be >= 0 and finite");
  }
  if (input_dim < 1) throw ValidationError("train.input_dim must be >= 1");
  if (hidden.empty()) throw ValidationError("train.hidden must not be empty");
}

bool TrainConfig::uses_regression() const {
  return variant == Variant::kRegression || variant == Variant::kRawRegression ||
         variant == Variant::kCotrain ||
         variant == Variant::kBootstrapped;
}

bool TrainConfig::uses_percentile() const {
  return variant != Variant::kRegression && variant != Variant::kRawRegression;
}

LossBreakdown ComputeLoss(const TrainConfig& config, const Prediction& pred,
                          double magnitude, const ContrastiveLabel& label) {
  LossBreakdown out;
  if (config.variant == Variant::kRawRegression) {
    const LossOutput reg = RawRegressionLoss(
        pred.y_hat, magnitude, config.raw_scale > 0.0 ? config.raw_scale : 1.0);
    out.reg = reg.loss;
    out.total = reg.loss;
    out.upstream.d_yhat = reg.d_loss_d_yhat;
    return out;
  }
  if (config.uses_regression()) {
    const LossOutput reg = RegressionLoss(pred.y_hat, magnitude);
    out.reg = reg.loss;
    out.upstream.d_yhat = reg.d_loss_d_yhat;
  }
  if (config.uses_percentile() && label.gate_open) {
    const LossOutput pct = SoftBce(pred.p_hat, label.value, config.clamp_eps);
    out.pct = pct.loss;
    // Percentile-only variants weigh the BCE by 1; co-trained ones by lambda.
    const double weight = config.uses_regression() ? config.lambda : 1.0;
    if (weight != 0.0) out.upstream.d_phat = weight * pct.d_loss_d_phat;
    out.total = out.reg + weight * out.pct;
  } else {
    out.total = out.reg;
  }
  return out;
}

Trainer::Trainer(TrainConfig config)
    : Trainer(config, DualHeadModel::Initialize(
                          {config.input_dim, config.hidden, config.seed})) {}

Trainer::Trainer(TrainConfig config, DualHeadModel model)
    : config_(std::move(config)), model_(std::move(model)) {
  config_.Validate();
  if (model_.input_dim() != config_.input_dim) {
    throw ValidationError("model input_dim " +
                          std::to_string(model_.input_dim()) +
                          " != configured " + std::to_string(config_.input_dim));
  }
  label_rng_.seed(MixSeed(config_.seed, 0x6c6162));
  ResetStore(0);
}

void Trainer::ResetStore(std::uint64_t epoch) {
  store_ = StateStore({config_.pool_capacity, config_.gate_threshold,
                       MixSeed(config_.seed, epoch)});
  epoch_steps_ = 0;
  epoch_loss_sum_ = 0.0;
}

ContrastiveLabel Trainer::BuildLabel(const UserState& state, double target,
                                     double y_hat) {
  const std::span<const PoolEntry> pool = state.pool;
  switch (config_.variant) {
    case Variant::kSingle:
      return SingleSampleLabel(target, pool, label_rng_);
    case Variant::kMulti:
    case Variant::kCotrain:
      return MultiSampleLabel(target, pool);
    case Variant::kValueWeighted:
      return ValueWeightedLabel(target, pool);
    case Variant::kBootstrapped:
      return BootstrappedLabel(y_hat, pool);
    case Variant::kRegression:
    case Variant::kRawRegression:
      break;
  }
  return ContrastiveLabel::GatedOff(LabelVariant::kMulti);
}

TrainRecord Trainer::Step(const Interaction& r) {
  const double target = config_.target == PercentileTarget::kMagnitude
                            ? r.y
                            : static_cast<double>(r.b);
  // (1) forward
  const Prediction pred = model_.Forward(r.features);
  // (2) gating on the counter before this interaction
  const UserState& state = store_.Peek(r.user_id);
  const bool gate_open =
      config_.uses_percentile() && GatingAllows(state, config_.gate_threshold);
  // (3) label from the pool before this interaction
  ContrastiveLabel label = ContrastiveLabel::GatedOff(LabelVariant::kMulti);
  if (gate_open) label = BuildLabel(state, target, pred.y_hat);
  // (4) loss
  const LossBreakdown loss = ComputeLoss(config_, pred, r.y, label);
  // (5) backward + step
  const ParameterGradients grads = model_.Backward(r.features, loss.upstream);
  model_.SgdStep(grads, config_.learning_rate);
  // (6) reservoir insert with the pre-step prediction
  store_.Update(r.user_id, {target, pred.y_hat});

  TrainRecord rec;
  rec.step = step_++;
  rec.user = r.user_id;
  rec.gate_open = gate_open;
  if (gate_open) rec.label = label.value;
  rec.target = target;
  rec.y_hat = pred.y_hat;
  rec.p_hat = pred.p_hat;
  rec.loss = loss.total;
  rec.reg_loss = loss.reg;
  rec.pct_loss = loss.pct;
  ++epoch_steps_;
  epoch_loss_sum_ += loss.total;
  rec.running_loss = epoch_loss_sum_ / static_cast<double>(epoch_steps_);
  return rec;
}

TrainResult Train(std::span<const Interaction> stream, const TrainConfig& config) {
  config.Validate();
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (stream[i].features.size() != config.input_dim) {
      throw ValidationError("interaction " + std::to_string(i) + " has " +
                            std::to_string(stream[i].features.size()) +
                            " features, model expects " +
                            std::to_string(config.input_dim));
    }
    if (i > 0 && stream[i].ts < stream[i - 1].ts) {
      throw ValidationError("timestamps out of order at interaction " +
                            std::to_string(i));
    }
  }
  TrainConfig resolved = config;
  if (resolved.variant == Variant::kRawRegression && resolved.raw_scale == 0.0) {
    double sum = 0.0;
    for (const Interaction& r : stream) sum += r.y;
    const double mean = stream.empty() ? 0.0 : sum / static_cast<double>(stream.size());
    resolved.raw_scale = mean > 0.0 ? mean : 1.0;
  }
  Trainer trainer(resolved);
  std::vector<TrainRecord> log;
  log.reserve(stream.size() * config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    trainer.ResetStore(epoch);
    for (const Interaction& r : stream) log.push_back(trainer.Step(r));
  }
  return {trainer.model(), trainer.store(), std::move(log)};
}

void WriteTrainLog(std::ostream& out, std::span<const TrainRecord> log) {
  for (const TrainRecord& r : log) {
    nlohmann::ordered_json j;
    j["step"] = r.step;
    j["user_id"] = r.user;
    j["gate_open"] = r.gate_open;
    j["label"] = r.label ? nlohmann::ordered_json(*r.label) : nullptr;
    j["target"] = r.target;
    j["y_hat"] = r.y_hat;
    j["p_hat"] = r.p_hat;
    j["loss"] = r.loss;
    j["reg_loss"] = r.reg_loss;
    j["pct_loss"] = r.pct_loss;
    j["running_loss"] = r.running_loss;
    out << j.dump() << '\n';
  }
}

}  // namespace pctl
