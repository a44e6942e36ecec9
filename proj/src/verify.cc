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

#include "pctl/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>

#include "pctl/label_engine.h"
#include "pctl/loss.h"
#include "pctl/model.h"
#include "pctl/rng.h"
#include "pctl/trainer.h"
#include "pctl/user_state.h"

namespace pctl {

namespace {

std::size_t Scaled(double base, const VerifyOptions& o) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(base * o.trials_scale)));
}

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

template <typename Fn>
SuiteResult Timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult r = fn();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                  .count();
  return r;
}

// Sample variance.
double Variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

std::vector<PoolEntry> UniformPool(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PoolEntry> pool(n);
  for (PoolEntry& e : pool) e.magnitude = u(rng);
  return pool;
}

}  // namespace

SuiteResult VerifyUnbiasedness(const VerifyOptions& o) {
  return Timed([&] {
    constexpr int kUsers = 20;
    constexpr double kProbes[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    constexpr std::size_t kPoolSize = 16;
    const std::size_t trials = Scaled(10000, o);
    std::mt19937_64 rng(MixSeed(o.seed, 1));
    const boost::math::normal std_normal;

    auto indicator_mean = [&](double y, const std::vector<PoolEntry>& proto,
                              const std::function<double()>& draw) {
      std::vector<PoolEntry> pool = proto;
      std::uniform_int_distribution<std::size_t> pick(0, kPoolSize - 1);
      double hits = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        for (PoolEntry& e : pool) e.magnitude = draw();
        if (o.ties_as_one) {
          hits += y >= pool[pick(rng)].magnitude ? 1.0 : 0.0;
        } else {
          hits += SingleSampleLabel(y, pool, rng).value;
        }
      }
      return hits / static_cast<double>(trials);
    };

    // Continuous magnitudes, then the same users recorded in whole seconds.
    int cells[2] = {0, 0};
    int passed[2] = {0, 0};
    const std::vector<PoolEntry> proto(kPoolSize);
    for (int u = 0; u < kUsers; ++u) {
      const double mu = 0.5 + 3.0 * u / (kUsers - 1);
      const double sigma = 0.6 + 0.2 * (u % 5);
      const boost::math::lognormal dist(mu, sigma);
      std::lognormal_distribution<double> draw(mu, sigma);
      for (double q : kProbes) {
        const double y = std::exp(mu + sigma * boost::math::quantile(std_normal, q));
        for (int discrete = 0; discrete < 2; ++discrete) {
          double probe = y;
          double truth = boost::math::cdf(dist, y);
          std::function<double()> sample = [&] { return draw(rng); };
          if (discrete) {
            probe = std::max(1.0, std::round(y));
            truth = boost::math::cdf(dist, probe - 0.5);  // P(round(Y) < probe)
            sample = [&] { return std::round(draw(rng)); };
          }
          const double mean = indicator_mean(probe, proto, sample);
          const double sd = std::sqrt(truth * (1.0 - truth) / trials);
          ++cells[discrete];
          if (std::abs(mean - truth) <= 3.0 * sd + 1e-12) ++passed[discrete];
        }
      }
    }
    const double frac_c = static_cast<double>(passed[0]) / cells[0];
    const double frac_d = static_cast<double>(passed[1]) / cells[1];
    SuiteResult r;
    r.claim = "single-sample indicator is unbiased for F_u(y-)";
    r.passed = frac_c >= 0.95 && frac_d >= 0.95;
    r.measured = "cells within 3 sd: continuous " + Fmt("%.3f", frac_c) +
                 ", whole-second " + Fmt("%.3f", frac_d);
    r.tolerance = ">= 0.95 of " + std::to_string(cells[0]) + " cells each, " +
                  std::to_string(trials) + " draws/cell";
    return r;
  });
}

SuiteResult VerifyVarianceReduction(const VerifyOptions& o) {
  return Timed([&] {
    const std::size_t reps = Scaled(10000, o);
    const double width = 0.2 / std::sqrt(std::min(1.0, o.trials_scale));
    std::mt19937_64 rng(MixSeed(o.seed, 2));
    bool ok = true;
    std::string measured;
    for (std::size_t n : {5u, 10u, 50u}) {
      std::vector<double> single(reps), multi(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        const auto pool = UniformPool(n, rng);
        multi[r] = MultiSampleLabel(0.5, pool).value;
        single[r] = SingleSampleLabel(0.5, pool, rng).value;
      }
      const double scaled_ratio = Variance(multi) / Variance(single) * n;
      ok = ok && std::abs(scaled_ratio - 1.0) <= width;
      measured += (measured.empty() ? "" : ", ") + std::string("N=") +
                  std::to_string(n) + ": " + Fmt("%.3f", scaled_ratio);
    }
    SuiteResult r;
    r.claim = "N-sample label variance is Var(B)/N";
    r.passed = ok;
    r.measured = "N*Var(multi)/Var(single) " + measured;
    r.tolerance = "1 +/- " + Fmt("%.3f", width) + ", " + std::to_string(reps) +
                  " reps";
    return r;
  });
}

SuiteResult VerifyLinearity(const VerifyOptions& o) {
  return Timed([&] {
    const std::size_t cases = Scaled(100000, o);
    std::mt19937_64 rng(MixSeed(o.seed, 3));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> size(1, 64);
    std::lognormal_distribution<double> mag(1.0, 1.0);
    double worst_mbce = 0.0;
    double worst_vw = 0.0;
    std::vector<std::uint8_t> ind;
    std::vector<PoolEntry> pool;
    for (std::size_t c = 0; c < cases; ++c) {
      const std::size_t n = size(rng);
      double p_hat = unit(rng);
      if (c % 20 == 0) p_hat = (c % 40 == 0) ? 1e-9 : 1.0 - 1e-9;
      ind.resize(n);
      std::size_t ones = 0;
      for (auto& b : ind) {
        b = unit(rng) < 0.5;
        ones += b;
      }
      const double per_term = MbcePerTerm(p_hat, ind).loss;
      const double soft = SoftBce(p_hat, static_cast<double>(ones) / n).loss;
      worst_mbce = std::max(worst_mbce, std::abs(per_term - soft));

      pool.resize(n);
      for (auto& e : pool) e.magnitude = (c % 97 == 0) ? 0.0 : mag(rng);
      const double y = mag(rng);
      const double vw = Vwbce(p_hat, pool, y).loss;
      const double vw_soft = SoftBce(p_hat, ValueWeightedLabel(y, pool).value).loss;
      worst_vw = std::max(worst_vw, std::abs(vw - vw_soft));
    }
    SuiteResult r;
    r.claim = "per-term MBCE/VWBCE equal soft-label BCE";
    r.passed = worst_mbce < 1e-12 && worst_vw < 1e-12;
    r.measured = "max |diff| MBCE " + Fmt("%.2e", worst_mbce) + ", VWBCE " +
                 Fmt("%.2e", worst_vw);
    r.tolerance = "< 1e-12 over " + std::to_string(cases) + " cases";
    return r;
  });
}

SuiteResult VerifySoftBceMinimizer(const VerifyOptions& o) {
  return Timed([&] {
    constexpr double kStep = 1e-4;
    const std::size_t targets = Scaled(100, o);
    std::mt19937_64 rng(MixSeed(o.seed, 4));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t t = 0; t < targets; ++t) {
      const double p_bar = unit(rng);
      double best_p = 0.0;
      double best_loss = INFINITY;
      for (int k = 1; k < 10000; ++k) {
        const double p = k * kStep;
        const double loss = SoftBce(p, p_bar).loss;
        if (loss < best_loss) {
          best_loss = loss;
          best_p = p;
        }
      }
      worst = std::max(worst, std::abs(best_p - p_bar));
    }
    SuiteResult r;
    r.claim = "soft-label BCE is minimized at p_hat = p_bar";
    r.passed = worst <= kStep + 1e-12;
    r.measured = "max |argmin - p_bar| " + Fmt("%.2e", worst);
    r.tolerance = "<= one grid step (1e-4), " + std::to_string(targets) + " labels";
    return r;
  });
}

SuiteResult VerifyValueWeightedOptimum(const VerifyOptions& o) {
  return Timed([&] {
    constexpr std::size_t kPool = 50;
    const std::size_t steps = Scaled(40000, o);
    const double tol = 0.02 / std::sqrt(std::min(1.0, o.trials_scale));
    std::mt19937_64 rng(MixSeed(o.seed, 5));
    // Partial expectation ratio of Uniform(0,1) by Simpson's rule.
    auto ratio = [](double y) {
      auto simpson = [](double a, double b) {
        constexpr int kIntervals = 1000;
        const double h = (b - a) / kIntervals;
        double s = a + b;  // f(t) = t
        for (int i = 1; i < kIntervals; ++i) s += (i % 2 ? 4.0 : 2.0) * (a + i * h);
        return s * h / 3.0;
      };
      return simpson(0.0, y) / simpson(0.0, 1.0);
    };
    bool ok = true;
    std::string measured;
    for (double y : {0.2, 0.5, 0.6, 0.9}) {
      double logit = 0.0;
      double avg = 0.0;
      std::size_t avg_n = 0;
      for (std::size_t t = 0; t < steps; ++t) {
        const double p = Logistic(logit);
        const auto pool = UniformPool(kPool, rng);
        const LossOutput out = Vwbce(p, pool, y);
        const double lr = 2.0 / std::sqrt(1.0 + t / 50.0);
        logit -= lr * out.d_loss_d_phat * p * (1.0 - p);
        if (t >= steps / 2) {
          avg += Logistic(logit);
          ++avg_n;
        }
      }
      avg /= static_cast<double>(avg_n);
      const double target = ratio(y);
      ok = ok && std::abs(avg - target) <= tol;
      measured += (measured.empty() ? "" : ", ") + Fmt("y=%.1f: ", y) +
                  Fmt("%.4f", avg) + Fmt(" (oracle %.4f)", target);
    }
    SuiteResult r;
    r.claim = "VWBCE optimum is the partial expectation ratio";
    r.passed = ok;
    r.measured = measured;
    r.tolerance = "+/- " + Fmt("%.3f", tol) + ", " + std::to_string(steps) + " steps";
    return r;
  });
}

SuiteResult VerifyReservoirUniformity(const VerifyOptions& o) {
  return Timed([&] {
    constexpr std::size_t kStream = 1000;
    constexpr std::size_t kCapacity = 50;
    const std::size_t reps = Scaled(10000, o);
    StateStore store({kCapacity, 10, MixSeed(o.seed, 6)});
    std::vector<double> counts(kStream, 0.0);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      for (std::size_t i = 0; i < kStream; ++i) {
        store.Update(rep, {static_cast<double>(i), 0.0});
      }
      for (const PoolEntry& e : store.Peek(rep).pool) {
        counts[static_cast<std::size_t>(e.magnitude)] += 1.0;
      }
    }
    // Inclusion counts are exchangeable with covariance
    // R p (1-p) M/(M-1) (I - J/M); rescaling gives chi-square(M-1).
    const double p = static_cast<double>(kCapacity) / kStream;
    const double expected = reps * p;
    double stat = 0.0;
    for (double c : counts) stat += (c - expected) * (c - expected);
    stat /= expected * (1.0 - p);
    stat *= static_cast<double>(kStream - 1) / kStream;
    const boost::math::chi_squared dist(kStream - 1);
    const double critical = boost::math::quantile(boost::math::complement(dist, 0.001));
    SuiteResult r;
    r.claim = "reservoir keeps each item with probability N/M";
    r.passed = stat < critical;
    r.measured = "chi2 " + Fmt("%.1f", stat) + " (df 999)";
    r.tolerance = "< " + Fmt("%.1f", critical) + " (alpha 0.001), " +
                  std::to_string(reps) + " reps";
    return r;
  });
}

SuiteResult VerifyGradients(const VerifyOptions& o) {
  return Timed([&] {
    constexpr double kH = 1e-5;
    constexpr double kFloor = 1e-5;
    constexpr std::size_t kInput = 12;
    const std::size_t triples = Scaled(100, o);
    std::mt19937_64 rng(MixSeed(o.seed, 7));
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t t = 0; t < triples; ++t) {
      DualHeadModel model = DualHeadModel::Initialize({kInput, {32}, MixSeed(o.seed, t)});
      std::vector<double> x(kInput);
      for (double& v : x) v = normal(rng);
      const Upstream up{normal(rng), normal(rng)};
      const ParameterGradients g = model.Backward(x, up);
      auto objective = [&](const DualHeadModel& m) {
        const Prediction p = m.Forward(x);
        return up.d_yhat * p.y_hat + up.d_phat * p.p_hat;
      };
      std::vector<double> analytic;
      g.ForEachTensor([&](const std::string&, std::span<const double> v) {
        analytic.insert(analytic.end(), v.begin(), v.end());
      });
      std::size_t k = 0;
      model.mutable_params().ForEachTensor([&](const std::string&, std::span<double> v) {
        for (double& theta : v) {
          const double saved = theta;
          theta = saved + kH;
          const double plus = objective(model);
          theta = saved - kH;
          const double minus = objective(model);
          theta = saved;
          const double numeric = (plus - minus) / (2.0 * kH);
          const double a = analytic[k++];
          const double denom = std::max({std::abs(a), std::abs(numeric), kFloor});
          worst = std::max(worst, std::abs(a - numeric) / denom);
        }
      });
    }

    // A gated-off step must leave the percentile head untouched.
    TrainConfig cfg;
    cfg.variant = Variant::kCotrain;
    cfg.input_dim = kInput;
    cfg.seed = o.seed;
    Trainer trainer(cfg);
    Interaction r;
    r.features.assign(kInput, 0.3);
    r.y = 5.0;
    bool gate_ok = true;
    for (std::uint64_t i = 0; i < cfg.gate_threshold; ++i) {
      const Dense before = trainer.model().params().percentile_head;
      r.ts = i;
      const TrainRecord rec = trainer.Step(r);
      gate_ok = gate_ok && !rec.gate_open &&
                trainer.model().params().percentile_head == before;
    }
    SuiteResult res;
    res.claim = "analytic gradients match finite differences";
    res.passed = worst < 1e-4 && gate_ok;
    res.measured = "max rel err " + Fmt("%.2e", worst) +
                   (gate_ok ? "; gated steps bit-identical" : "; GATED STEP MOVED HEAD");
    res.tolerance = "< 1e-4 over " + std::to_string(triples) + " triples";
    return res;
  });
}

std::vector<SuiteResult> RunVerify(const VerifyOptions& options) {
  return {
      VerifyUnbiasedness(options),       VerifyVarianceReduction(options),
      VerifyLinearity(options),          VerifySoftBceMinimizer(options),
      VerifyValueWeightedOptimum(options), VerifyReservoirUniformity(options),
      VerifyGradients(options),
  };
}

void PrintVerifyTable(std::ostream& out, const std::vector<SuiteResult>& results) {
  for (const SuiteResult& r : results) {
    out << (r.passed ? "PASS" : "FAIL") << "  " << r.claim << "\n"
        << "      measured:  " << r.measured << "\n"
        << "      tolerance: " << r.tolerance << "\n"
        << "      time:      " << std::fixed << std::setprecision(2) << r.seconds
        << " s\n";
  }
}

}  // namespace pctl
