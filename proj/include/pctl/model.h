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

#ifndef PCTL_MODEL_H_
#define PCTL_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pctl {

struct ModelConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden = {32};
  std::uint64_t seed = 0;
};

// Fully connected layer; weight is row-major [out][in].
struct Dense {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  Dense() = default;
  Dense(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weight(in_dim * out_dim), bias(out_dim) {}

  bool operator==(const Dense&) const = default;
};

// Every trainable tensor of the model. Gradients share this layout.
struct Parameters {
  std::vector<Dense> backbone;  // tanh layers
  Dense regression_head;        // softplus output
  Dense percentile_head;        // logistic output

  // Visits (name, values) for each tensor in a fixed order.
  void ForEachTensor(
      const std::function<void(const std::string&, std::span<double>)>& fn);
  void ForEachTensor(const std::function<void(const std::string&,
                                              std::span<const double>)>& fn) const;
  std::size_t size() const;

  bool operator==(const Parameters&) const = default;
};

using ParameterGradients = Parameters;

struct Prediction {
  double y_hat = 0.0;  // >= 0
  double p_hat = 0.5;  // in (0, 1)
};

// Gradients of the loss with respect to the head outputs.
struct Upstream {
  double d_yhat = 0.0;
  double d_phat = 0.0;
};

// Shared tanh backbone feeding a regression head and a percentile head.
class DualHeadModel {
 public:
  DualHeadModel() = default;

  // Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from config.seed, biases 0.
  static DualHeadModel Initialize(const ModelConfig& config);
  // All parameters zero.
  static DualHeadModel Zeros(std::size_t input_dim,
                             const std::vector<std::size_t>& hidden);
  static DualHeadModel FromParameters(Parameters params);

  std::size_t input_dim() const;
  const Parameters& params() const { return params_; }
  Parameters& mutable_params() { return params_; }

  // x must have input_dim() entries.
  Prediction Forward(std::span<const double> x) const;

  // Exact parameter gradients for the given head-output gradients. Recomputes
  // the forward activations. A zero d_phat contributes nothing anywhere.
  ParameterGradients Backward(std::span<const double> x,
                              const Upstream& upstream) const;

  // theta <- theta - lr * grad. Throws ValidationError for lr <= 0 and
  // NumericError naming the first non-finite gradient entry; the model is
  // left untouched on error.
  void SgdStep(const ParameterGradients& grads, double learning_rate);

  bool operator==(const DualHeadModel&) const = default;

 private:
  explicit DualHeadModel(Parameters params) : params_(std::move(params)) {}

  Parameters params_;
};

double Softplus(double z);
double Logistic(double z);

std::vector<std::uint8_t> SaveModel(const DualHeadModel& model);
DualHeadModel LoadModel(std::span<const std::uint8_t> bytes);

}  // namespace pctl

#endif  // PCTL_MODEL_H_
