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

#ifndef PCTL_LABEL_ENGINE_H_
#define PCTL_LABEL_ENGINE_H_

#include <cstddef>
#include <random>
#include <span>
#include <string_view>

#include "pctl/errors.h"
#include "pctl/user_state.h"

namespace pctl {

enum class LabelVariant { kSingle, kMulti, kValueWeighted, kBootstrapped };

std::string_view LabelVariantName(LabelVariant v);

// Soft percentile target for the percentile head.
struct ContrastiveLabel {
  double value = 0.0;  // in [0, 1]
  LabelVariant variant = LabelVariant::kMulti;
  // False means the instance did not pass gradient gating and the percentile
  // head must receive no gradient from it.
  bool gate_open = true;
  std::size_t sample_count = 0;
  // Set when value-weighting fell back to the unweighted label because the
  // pool had zero total magnitude.
  bool weight_fallback = false;

  static ContrastiveLabel GatedOff(LabelVariant variant) {
    ContrastiveLabel l;
    l.variant = variant;
    l.gate_open = false;
    return l;
  }
};

// I(y > y'), ties go to 0.
inline double Indicator(double y, double reference) {
  return y > reference ? 1.0 : 0.0;
}

// Draws one reference uniformly from the pool and returns the indicator.
template <std::uniform_random_bit_generator Rng>
ContrastiveLabel SingleSampleLabel(double y, std::span<const PoolEntry> pool,
                                   Rng& rng) {
  if (pool.empty()) throw GatingError("single-sample label on empty pool");
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  ContrastiveLabel l;
  l.value = Indicator(y, pool[pick(rng)].magnitude);
  l.variant = LabelVariant::kSingle;
  l.sample_count = 1;
  return l;
}

// Fraction of pool magnitudes strictly below y, over the whole pool.
ContrastiveLabel MultiSampleLabel(double y, std::span<const PoolEntry> pool);

// Share of total pool magnitude held by entries strictly below y.
ContrastiveLabel ValueWeightedLabel(double y, std::span<const PoolEntry> pool);

// Multi-sample label computed in prediction space: fraction of pool
// prior_pred values strictly below y_hat.
ContrastiveLabel BootstrappedLabel(double y_hat,
                                   std::span<const PoolEntry> pool);

}  // namespace pctl

#endif  // PCTL_LABEL_ENGINE_H_
