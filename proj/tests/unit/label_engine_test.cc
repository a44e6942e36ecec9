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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pctl/errors.h"

namespace pctl {
namespace {

std::vector<PoolEntry> Pool(std::initializer_list<double> magnitudes) {
  std::vector<PoolEntry> pool;
  for (double m : magnitudes) pool.push_back({m, 0.0});
  return pool;
}

std::vector<PoolEntry> PredPool(std::initializer_list<double> preds) {
  std::vector<PoolEntry> pool;
  for (double p : preds) pool.push_back({0.0, p});
  return pool;
}

// Composite Simpson rule on [a, b] with n (even) panels.
template <typename F>
double Simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

TEST(SingleSampleLabel, Indicator) {
  std::mt19937_64 rng(0);
  EXPECT_EQ(SingleSampleLabel(5.0, Pool({3.0}), rng).value, 1.0);
  EXPECT_EQ(SingleSampleLabel(5.0, Pool({5.0}), rng).value, 0.0);
  const ContrastiveLabel l = SingleSampleLabel(5.0, Pool({3.0}), rng);
  EXPECT_EQ(l.variant, LabelVariant::kSingle);
  EXPECT_EQ(l.sample_count, 1u);
  EXPECT_TRUE(l.gate_open);
}

TEST(SingleSampleLabel, MeanOverDraws) {
  // y=2 against [1, 3]: exactly half the pool is below, so the mean of
  // 10000 draws is within 3 * sqrt(0.25 / 10000) = 0.015 of 0.5.
  std::mt19937_64 rng(2024);
  const auto pool = Pool({1.0, 3.0});
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double v = SingleSampleLabel(2.0, pool, rng).value;
    ASSERT_TRUE(v == 0.0 || v == 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.015);
}

TEST(SingleSampleLabel, EmptyPool) {
  std::mt19937_64 rng(0);
  EXPECT_THROW(SingleSampleLabel(1.0, {}, rng), GatingError);
}

TEST(MultiSampleLabel, Examples) {
  EXPECT_DOUBLE_EQ(MultiSampleLabel(5.0, Pool({1, 3, 7})).value, 2.0 / 3.0);
  EXPECT_EQ(MultiSampleLabel(0.0, Pool({0.5, 1, 2})).value, 0.0);
  EXPECT_EQ(MultiSampleLabel(10.0, Pool({1, 2, 3, 4, 5, 6, 7, 8, 9})).value, 1.0);
  const ContrastiveLabel l = MultiSampleLabel(5.0, Pool({1, 3, 7}));
  EXPECT_EQ(l.sample_count, 3u);
  EXPECT_EQ(l.variant, LabelVariant::kMulti);
}

TEST(MultiSampleLabel, TiesCountZero) {
  EXPECT_EQ(MultiSampleLabel(2.0, Pool({2, 2, 2})).value, 0.0);
  EXPECT_DOUBLE_EQ(MultiSampleLabel(2.0, Pool({1, 2, 3, 2})).value, 0.25);
}

TEST(MultiSampleLabel, EmptyPool) {
  EXPECT_THROW(MultiSampleLabel(1.0, {}), GatingError);
}

TEST(ValueWeightedLabel, Examples) {
  EXPECT_DOUBLE_EQ(ValueWeightedLabel(5.0, Pool({1, 3, 7})).value, 4.0 / 11.0);
  EXPECT_EQ(ValueWeightedLabel(100.0, Pool({1, 3, 7})).value, 1.0);
  EXPECT_EQ(ValueWeightedLabel(5.0, Pool({1, 3, 7})).variant,
            LabelVariant::kValueWeighted);
}

TEST(ValueWeightedLabel, ZeroTotalFallsBackToMulti) {
  const ContrastiveLabel l = ValueWeightedLabel(1.0, Pool({0, 0, 0, 0}));
  EXPECT_TRUE(l.weight_fallback);
  EXPECT_EQ(l.value, 1.0);
  EXPECT_EQ(ValueWeightedLabel(0.0, Pool({0, 0})).value, 0.0);
  EXPECT_FALSE(ValueWeightedLabel(5.0, Pool({1, 3, 7})).weight_fallback);
}

TEST(ValueWeightedLabel, ApproachesPartialExpectationRatio) {
  // Large Uniform(0,1) pool: the label tends to
  // int_0^y t dt / int_0^1 t dt, evaluated here by quadrature.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PoolEntry> pool(200000);
  for (PoolEntry& e : pool) e.magnitude = unit(rng);
  const auto id = [](double t) { return t; };
  for (double y : {0.2, 0.5, 0.6, 0.9}) {
    const double oracle = Simpson(id, 0.0, y, 200) / Simpson(id, 0.0, 1.0, 200);
    EXPECT_NEAR(ValueWeightedLabel(y, pool).value, oracle, 0.005) << y;
  }
}

TEST(ValueWeightedLabel, EmptyPool) {
  EXPECT_THROW(ValueWeightedLabel(1.0, {}), GatingError);
}

TEST(BootstrappedLabel, Examples) {
  EXPECT_DOUBLE_EQ(BootstrappedLabel(0.4, PredPool({0.1, 0.3, 0.9})).value,
                   2.0 / 3.0);
  EXPECT_EQ(BootstrappedLabel(0.7, PredPool({0.7, 0.7, 0.7})).value, 0.0);
  EXPECT_EQ(BootstrappedLabel(0.4, PredPool({0.1})).variant,
            LabelVariant::kBootstrapped);
}

TEST(BootstrappedLabel, IgnoresMagnitudes) {
  std::vector<PoolEntry> pool = {{0.0, 0.1}, {0.0, 0.5}, {0.0, 0.9}};
  const double with_zeros = BootstrappedLabel(0.6, pool).value;
  for (PoolEntry& e : pool) e.magnitude = 1.0;
  EXPECT_EQ(BootstrappedLabel(0.6, pool).value, with_zeros);
  EXPECT_EQ(MultiSampleLabel(0.0, pool).value, 0.0);
}

TEST(BootstrappedLabel, EmptyPool) {
  EXPECT_THROW(BootstrappedLabel(1.0, {}), GatingError);
}

TEST(Labels, GatedOffCarriesVariant) {
  const ContrastiveLabel l = ContrastiveLabel::GatedOff(LabelVariant::kBootstrapped);
  EXPECT_FALSE(l.gate_open);
  EXPECT_EQ(l.variant, LabelVariant::kBootstrapped);
}

TEST(Labels, VariantNames) {
  EXPECT_EQ(LabelVariantName(LabelVariant::kSingle), "single");
  EXPECT_EQ(LabelVariantName(LabelVariant::kMulti), "multi");
  EXPECT_EQ(LabelVariantName(LabelVariant::kValueWeighted), "value_weighted");
  EXPECT_EQ(LabelVariantName(LabelVariant::kBootstrapped), "bootstrapped");
}

// Random pools with duplicates and zeros; every variant must be bounded and
// non-decreasing in its argument, and multi must be an exact k / n.
TEST(Labels, BoundsMonotonicityAndGrid) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(1, 60);
  std::uniform_int_distribution<int> level(0, 20);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<PoolEntry> pool(size(rng));
    for (PoolEntry& e : pool) {
      e.magnitude = level(rng) * 0.5;
      e.prior_pred = level(rng) * 0.25;
    }
    double prev_multi = -1, prev_vw = -1, prev_boot = -1;
    for (int k = 0; k <= 45; ++k) {
      const double y = k * 0.25;
      const ContrastiveLabel m = MultiSampleLabel(y, pool);
      const ContrastiveLabel v = ValueWeightedLabel(y, pool);
      const ContrastiveLabel b = BootstrappedLabel(y, pool);
      for (const ContrastiveLabel* l : {&m, &v, &b}) {
        ASSERT_GE(l->value, 0.0);
        ASSERT_LE(l->value, 1.0);
      }
      // A whole number of pool entries, up to division rounding.
      const double scaled = m.value * pool.size();
      ASSERT_NEAR(scaled, std::round(scaled), 1e-9);
      ASSERT_EQ(m.sample_count, pool.size());
      ASSERT_GE(m.value, prev_multi);
      ASSERT_GE(v.value, prev_vw);
      ASSERT_GE(b.value, prev_boot);
      prev_multi = m.value;
      prev_vw = v.value;
      prev_boot = b.value;
    }
  }
}

}  // namespace
}  // namespace pctl
