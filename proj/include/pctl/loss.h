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

#ifndef PCTL_LOSS_H_
#define PCTL_LOSS_H_

#include <cstdint>
#include <span>

#include "pctl/label_engine.h"
#include "pctl/user_state.h"

namespace pctl {

inline constexpr double kDefaultClampEps = 1e-7;

// Loss value with its gradients with respect to the two head outputs.
struct LossOutput {
  double loss = 0.0;
  double d_loss_d_phat = 0.0;
  double d_loss_d_yhat = 0.0;
};

// -p_bar log p_hat - (1 - p_bar) log(1 - p_hat), with p_hat clamped to
// [eps, 1 - eps] for both value and derivative. NaN input throws.
LossOutput SoftBce(double p_hat, double p_bar, double eps = kDefaultClampEps);

// Mean of per-reference BCE terms against 0/1 indicators. Equal to
// SoftBce(p_hat, mean(indicators)) up to rounding.
LossOutput MbcePerTerm(double p_hat, std::span<const std::uint8_t> indicators,
                       double eps = kDefaultClampEps);

// BCE terms weighted by reference magnitude Y'_i / sum_j Y'_j. A pool with
// zero total magnitude falls back to the unweighted per-term mean.
LossOutput Vwbce(double p_hat, std::span<const PoolEntry> pool, double y,
                 double eps = kDefaultClampEps);

// Squared error between log1p(y_hat) and log1p(y).
LossOutput RegressionLoss(double y_hat, double y);

// Squared error between y_hat and y / scale, on the untransformed magnitude.
// Large magnitudes dominate the gradient, as in plain watch-time regression.
LossOutput RawRegressionLoss(double y_hat, double y, double scale);

// L_reg(y_hat, y) + lambda * SoftBce(p_hat, label). A closed gate removes the
// percentile term and leaves d_loss_d_phat exactly zero.
LossOutput CotrainLoss(double y_hat, double y, double p_hat,
                       const ContrastiveLabel& label, double lambda,
                       double eps = kDefaultClampEps);

}  // namespace pctl

#endif  // PCTL_LOSS_H_
