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

#include "pctl/label_engine.h"

#include <string>

namespace pctl {

std::string_view LabelVariantName(LabelVariant v) {
  switch (v) {
    case LabelVariant::kSingle:
      return "single";
    case LabelVariant::kMulti:
      return "multi";
    case LabelVariant::kValueWeighted:
      return "value_weighted";
    case LabelVariant::kBootstrapped:
      return "bootstrapped";
  }
  return "unknown";
}

namespace {

void RequireNonEmpty(std::span<const PoolEntry> pool, const char* who) {
  if (pool.empty()) {
    throw GatingError(std::string(who) + " label on empty pool");
  }
}

}  // namespace

ContrastiveLabel MultiSampleLabel(double y, std::span<const PoolEntry> pool) {
  RequireNonEmpty(pool, "multi-sample");
  std::size_t below = 0;
  for (const PoolEntry& e : pool) below += y > e.magnitude;
  ContrastiveLabel l;
  l.value = static_cast<double>(below) / static_cast<double>(pool.size());
  l.variant = LabelVariant::kMulti;
  l.sample_count = pool.size();
  return l;
}

ContrastiveLabel ValueWeightedLabel(double y, std::span<const PoolEntry> pool) {
  RequireNonEmpty(pool, "value-weighted");
  double below = 0.0;
  double total = 0.0;
  for (const PoolEntry& e : pool) {
    total += e.magnitude;
    if (y > e.magnitude) below += e.magnitude;
  }
  if (!(total > 0.0)) {
    ContrastiveLabel l = MultiSampleLabel(y, pool);
    l.variant = LabelVariant::kValueWeighted;
    l.weight_fallback = true;
    return l;
  }
  ContrastiveLabel l;
  // below <= total always; the clamp only absorbs summation-order rounding.
  l.value = below >= total ? 1.0 : below / total;
  l.variant = LabelVariant::kValueWeighted;
  l.sample_count = pool.size();
  return l;
}

ContrastiveLabel BootstrappedLabel(double y_hat,
                                   std::span<const PoolEntry> pool) {
  RequireNonEmpty(pool, "bootstrapped");
  std::size_t below = 0;
  for (const PoolEntry& e : pool) below += y_hat > e.prior_pred;
  ContrastiveLabel l;
  l.value = static_cast<double>(below) / static_cast<double>(pool.size());
  l.variant = LabelVariant::kBootstrapped;
  l.sample_count = pool.size();
  return l;
}

}  // namespace pctl
