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

#include "pctl/loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pctl/errors.h"

namespace pctl {

namespace {

void CheckFinite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string("non-finite ") + name + " in loss");
  }
}

double Clamp(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }

}  // namespace

LossOutput SoftBce(double p_hat, double p_bar, double eps) {
  CheckFinite(p_hat, "p_hat");
  CheckFinite(p_bar, "p_bar");
  const double p = Clamp(p_hat, eps);
  LossOutput out;
  out.loss = -p_bar * std::log(p) - (1.0 - p_bar) * std::log1p(-p);
  out.d_loss_d_phat = -p_bar / p + (1.0 - p_bar) / (1.0 - p);
  return out;
}

LossOutput MbcePerTerm(double p_hat, std::span<const std::uint8_t> indicators,
                       double eps) {
  if (indicators.empty()) throw GatingError("MBCE over empty indicator list");
  CheckFinite(p_hat, "p_hat");
  const double p = Clamp(p_hat, eps);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  LossOutput out;
  for (std::uint8_t b : indicators) {
    const double bi = b ? 1.0 : 0.0;
    out.loss += -bi * log_p - (1.0 - bi) * log_q;
    out.d_loss_d_phat += -bi / p + (1.0 - bi) / (1.0 - p);
  }
  const double n = static_cast<double>(indicators.size());
  out.loss /= n;
  out.d_loss_d_phat /= n;
  return out;
}

LossOutput Vwbce(double p_hat, std::span<const PoolEntry> pool, double y,
                 double eps) {
  if (pool.empty()) throw GatingError("VWBCE over empty pool");
  CheckFinite(p_hat, "p_hat");
  CheckFinite(y, "y");
  double total = 0.0;
  for (const PoolEntry& e : pool) total += e.magnitude;
  const bool fallback = !(total > 0.0);
  const double norm = fallback ? static_cast<double>(pool.size()) : total;

  const double p = Clamp(p_hat, eps);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  LossOutput out;
  for (const PoolEntry& e : pool) {
    const double w = fallback ? 1.0 : e.magnitude;
    const double b = Indicator(y, e.magnitude);
    out.loss += w * (-b * log_p - (1.0 - b) * log_q);
    out.d_loss_d_phat += w * (-b / p + (1.0 - b) / (1.0 - p));
  }
  out.loss /= norm;
  out.d_loss_d_phat /= norm;
  return out;
}

LossOutput RegressionLoss(double y_hat, double y) {
  CheckFinite(y_hat, "y_hat");
  CheckFinite(y, "y");
  const double diff = std::log1p(y_hat) - std::log1p(y);
  LossOutput out;
  out.loss = diff * diff;
  out.d_loss_d_yhat = 2.0 * diff / (1.0 + y_hat);
  return out;
}

LossOutput RawRegressionLoss(double y_hat, double y, double scale) {
  CheckFinite(y_hat, "y_hat");
  CheckFinite(y, "y");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ValidationError("raw regression scale must be positive and finite");
  }
  const double diff = y_hat - y / scale;
  LossOutput out;
  out.loss = diff * diff;
  out.d_loss_d_yhat = 2.0 * diff;
  return out;
}

LossOutput CotrainLoss(double y_hat, double y, double p_hat,
                       const ContrastiveLabel& label, double lambda,
                       double eps) {
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  LossOutput out = RegressionLoss(y_hat, y);
  if (!label.gate_open || lambda == 0.0) return out;
  const LossOutput pct = SoftBce(p_hat, label.value, eps);
  out.loss += lambda * pct.loss;
  out.d_loss_d_phat = lambda * pct.d_loss_d_phat;
  return out;
}

}  // namespace pctl
