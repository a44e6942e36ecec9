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

// Acceptance suite: one PASS/FAIL line per criterion with the measured value,
// the tolerance and the runtime. Every expected value is computed here from
// first principles; the library only supplies the code under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pctl/binary_io.h"
#include "pctl/experiment.h"
#include "pctl/label_engine.h"
#include "pctl/loss.h"
#include "pctl/model.h"
#include "pctl/rng.h"
#include "pctl/trainer.h"
#include "pctl/user_state.h"

namespace pctl {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool passed = false;
  std::string measured;
  std::string tolerance;
};

std::string Fmt(const char* fmt, double v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// Runs one criterion, appends its runtime limit to the verdict and prints the
// line. Exceptions count as failures.
bool Report(int id, const std::string& name, double limit_s,
            const std::function<Outcome()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.passed = false;
    o.measured = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool ok = o.passed;
  std::string time = Fmt("%.2f s", secs);
  if (limit_s > 0) {
    time += Fmt(" (limit %.0f s)", limit_s);
    ok = ok && secs < limit_s;
  }
  std::cout << (ok ? "PASS" : "FAIL") << " [" << id << "] " << name
            << " | measured: " << o.measured << " | tolerance: " << o.tolerance
            << " | time: " << time << std::endl;
  return ok;
}

double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double SampleVariance(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / (v.size() - 1);
}

// Binary cross-entropy written out directly, without clamping.
double Bce(double p, double target) {
  return -target * std::log(p) - (1.0 - target) * std::log(1.0 - p);
}

// 1. The single-sample indicator drawn from a reservoir pool is unbiased for
// the user's CDF.
Outcome Unbiasedness() {
  constexpr int kUsers = 20;
  constexpr int kDraws = 10000;
  constexpr int kHistory = 80;  // interactions streamed into each pool
  constexpr double kQuantiles[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::mt19937_64 rng(101);
  int cells = 0, within = 0;
  for (int u = 0; u < kUsers; ++u) {
    const double mu = 0.2 + 0.2 * u;
    const double sigma = 0.5 + 0.1 * (u % 7);
    std::lognormal_distribution<double> draw(mu, sigma);
    std::normal_distribution<double> z(0.0, 1.0);
    double probes[5];
    for (int k = 0; k < 5; ++k) {
      // Probe magnitudes spread over the distribution, jittered off the grid.
      const double q = std::clamp(kQuantiles[k] + 0.05 * z(rng), 0.02, 0.98);
      double lo = -10, hi = 10;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (NormalCdf(mid) < q ? lo : hi) = mid;
      }
      probes[k] = std::exp(mu + sigma * lo);
    }
    double hits[5] = {0, 0, 0, 0, 0};
    for (int d = 0; d < kDraws; ++d) {
      StateStore store({50, 10, MixSeed(77, static_cast<std::uint64_t>(u) * kDraws + d)});
      for (int i = 0; i < kHistory; ++i) store.Update(0, {draw(rng), 0.0});
      const auto& pool = store.Peek(0).pool;
      for (int k = 0; k < 5; ++k) {
        hits[k] += SingleSampleLabel(probes[k], std::span<const PoolEntry>(pool), rng).value;
      }
    }
    for (int k = 0; k < 5; ++k) {
      const double truth = NormalCdf((std::log(probes[k]) - mu) / sigma);
      const double mean = hits[k] / kDraws;
      const double sd = std::sqrt(truth * (1 - truth) / kDraws);
      ++cells;
      if (std::abs(mean - truth) <= 3 * sd) ++within;
    }
  }
  const double frac = static_cast<double>(within) / cells;
  return {frac >= 0.95, Fmt("%.3f", frac) + " of " + std::to_string(cells) + " cells within 3 sd",
          ">= 0.95, 10000 draws per cell"};
}

// 2. Averaging N indicators divides the label variance by N.
Outcome VarianceReduction() {
  constexpr int kReps = 10000;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool ok = true;
  std::string measured;
  for (std::size_t n : {5u, 10u, 50u}) {
    std::vector<double> multi(kReps), single(kReps);
    std::vector<PoolEntry> pool(n);
    for (int r = 0; r < kReps; ++r) {
      for (PoolEntry& e : pool) e.magnitude = unit(rng);
      multi[r] = MultiSampleLabel(0.5, pool).value;
      single[r] = SingleSampleLabel(0.5, std::span<const PoolEntry>(pool), rng).value;
    }
    const double ratio = SampleVariance(multi) / SampleVariance(single);
    const bool in = ratio >= 0.8 / n && ratio <= 1.2 / n;
    ok = ok && in;
    measured += (measured.empty() ? "" : ", ") + std::string("N=") + std::to_string(n) +
                ": " + Fmt("%.4f", ratio) + Fmt(" (1/N=%.4f)", 1.0 / n);
  }
  return {ok, measured, "ratio in [0.8/N, 1.2/N], 10000 reps, p = 0.5"};
}

// 3. Per-term MBCE and VWBCE equal BCE against the soft label.
Outcome Linearity() {
  constexpr int kCases = 100000;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 100);
  std::lognormal_distribution<double> mag(0.5, 1.2);
  double worst_m = 0.0, worst_v = 0.0, worst_ref = 0.0;
  for (int c = 0; c < kCases; ++c) {
    const int n = size(rng);
    const double p_hat = 0.001 + 0.998 * unit(rng);
    std::vector<std::uint8_t> ind(n);
    std::vector<PoolEntry> pool(n);
    int ones = 0;
    for (int i = 0; i < n; ++i) {
      ind[i] = unit(rng) < 0.3 ? 1 : 0;
      ones += ind[i];
      pool[i].magnitude = (c % 50 == 0) ? 0.0 : mag(rng);
    }
    const double p_bar = static_cast<double>(ones) / n;
    worst_m = std::max(worst_m, std::abs(MbcePerTerm(p_hat, ind).loss - SoftBce(p_hat, p_bar).loss));
    // Reference: per-term mean written out here.
    double ref = 0.0;
    for (std::uint8_t b : ind) ref += Bce(p_hat, b);
    worst_ref = std::max(worst_ref, std::abs(ref / n - SoftBce(p_hat, p_bar).loss));

    const double y = mag(rng);
    double below = 0.0, total = 0.0;
    for (const PoolEntry& e : pool) {
      total += e.magnitude;
      if (y > e.magnitude) below += e.magnitude;
    }
    // Zero-mass pools fall back to the unweighted label.
    double soft = 0.0;
    if (total > 0) {
      soft = below / total;
    } else {
      for (const PoolEntry& e : pool) soft += y > e.magnitude ? 1.0 : 0.0;
      soft /= n;
    }
    worst_v = std::max(worst_v, std::abs(Vwbce(p_hat, pool, y).loss - SoftBce(p_hat, soft).loss));
  }
  return {worst_m < 1e-12 && worst_v < 1e-12 && worst_ref < 1e-12,
          "max |diff| MBCE " + Fmt("%.2e", worst_m) + ", VWBCE " + Fmt("%.2e", worst_v) +
              ", hand-written MBCE " + Fmt("%.2e", worst_ref),
          "< 1e-12 over 100000 cases"};
}

// 4. Soft-label BCE is minimized at the soft label.
Outcome SoftBceMinimizer() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double p_bar = unit(rng);
    int best = 1;
    double best_loss = INFINITY;
    for (int k = 1; k < 10000; ++k) {
      const double l = SoftBce(k * 1e-4, p_bar).loss;
      if (l < best_loss) best_loss = l, best = k;
    }
    worst = std::max(worst, std::abs(best * 1e-4 - p_bar));
  }
  return {worst <= 1e-4 + 1e-12, "max |argmin - p_bar| " + Fmt("%.2e", worst),
          "<= 1e-4 (one grid step), 100 labels"};
}

// 5. A free scalar trained on VWBCE converges to the partial expectation ratio.
Outcome ValueWeightedOptimum() {
  constexpr int kSteps = 60000;
  constexpr std::size_t kPool = 50;
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Trapezoid integration of t on [0, y] over [0, 1].
  auto oracle = [](double y) {
    auto integrate = [](double b) {
      constexpr int kN = 100000;
      const double h = b / kN;
      double s = 0.5 * b;
      for (int i = 1; i < kN; ++i) s += i * h;
      return s * h;
    };
    return integrate(y) / integrate(1.0);
  };
  bool ok = true;
  std::string measured;
  for (double y : {0.6, 0.2, 0.5, 0.9}) {
    double logit = 0.0, avg = 0.0;
    int avg_n = 0;
    std::vector<PoolEntry> pool(kPool);
    for (int t = 0; t < kSteps; ++t) {
      for (PoolEntry& e : pool) e.magnitude = unit(rng);
      const double p = 1.0 / (1.0 + std::exp(-logit));
      const double g = Vwbce(p, pool, y).d_loss_d_phat * p * (1 - p);
      logit -= 1.0 / std::sqrt(1.0 + t / 100.0) * g;
      if (t >= kSteps / 2) avg += 1.0 / (1.0 + std::exp(-logit)), ++avg_n;
    }
    avg /= avg_n;
    const double want = oracle(y);
    ok = ok && std::abs(avg - want) <= 0.02;
    measured += (measured.empty() ? "" : ", ") + Fmt("y=%.1f: ", y) + Fmt("%.4f", avg) +
                Fmt(" vs %.4f", want);
  }
  return {ok, measured, "+/- 0.02 of the integrated ratio"};
}

// 6. Reservoir inclusion frequencies are uniform.
Outcome ReservoirUniformity() {
  constexpr std::size_t kStream = 1000, kCap = 50;
  constexpr int kReps = 10000;
  std::vector<double> counts(kStream, 0.0);
  StateStore store({kCap, 10, 606});
  for (int rep = 0; rep < kReps; ++rep) {
    for (std::size_t i = 0; i < kStream; ++i) store.Update(rep, {static_cast<double>(i), 0.0});
    for (const PoolEntry& e : store.Peek(rep).pool) counts[static_cast<std::size_t>(e.magnitude)] += 1;
  }
  // Each count is Binomial(R, N/M); the fixed total N R makes the Pearson
  // statistic, rescaled by M / ((M - 1)(1 - p)), chi-square with M - 1 df.
  const double p = static_cast<double>(kCap) / kStream;
  const double e = kReps * p;
  double pearson = 0.0;
  for (double c : counts) pearson += (c - e) * (c - e) / e;
  const double stat = pearson / (1 - p) * (kStream - 1.0) / kStream;
  // Wilson-Hilferty upper 0.001 point of chi-square(999).
  const double k = kStream - 1.0, z = 3.090232306167813;
  const double crit = k * std::pow(1 - 2 / (9 * k) + z * std::sqrt(2 / (9 * k)), 3);
  return {stat < crit, "chi2 " + Fmt("%.1f", stat) + " (df 999)",
          "< " + Fmt("%.1f", crit) + " (alpha 0.001), 10000 reps"};
}

// 7. Analytic loss gradients match central differences; gated steps leave the
// percentile head untouched.
Outcome Gradients() {
  constexpr std::size_t kInput = 10;
  constexpr double kH = 1e-5;
  std::mt19937_64 rng(707);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Variant variants[] = {Variant::kCotrain, Variant::kMulti, Variant::kRawRegression,
                              Variant::kRegression};
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    TrainConfig cfg;
    cfg.variant = variants[t % 4];
    cfg.lambda = 0.5 + unit(rng);
    cfg.raw_scale = 3.0;
    cfg.input_dim = kInput;
    DualHeadModel model = DualHeadModel::Initialize({kInput, {16, 8}, static_cast<std::uint64_t>(t)});
    std::vector<double> x(kInput);
    for (double& v : x) v = normal(rng);
    const double y = std::exp(normal(rng));
    ContrastiveLabel label;
    label.value = unit(rng);
    auto loss = [&](const DualHeadModel& m) {
      return ComputeLoss(cfg, m.Forward(x), y, label).total;
    };
    const ParameterGradients g =
        model.Backward(x, ComputeLoss(cfg, model.Forward(x), y, label).upstream);
    std::vector<double> analytic;
    g.ForEachTensor([&](const std::string&, std::span<const double> v) {
      analytic.insert(analytic.end(), v.begin(), v.end());
    });
    std::size_t i = 0;
    model.mutable_params().ForEachTensor([&](const std::string&, std::span<double> v) {
      for (double& th : v) {
        const double saved = th;
        th = saved + kH;
        const double up = loss(model);
        th = saved - kH;
        const double down = loss(model);
        th = saved;
        const double fd = (up - down) / (2 * kH);
        const double a = analytic[i++];
        worst = std::max(worst, std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6}));
      }
    });
  }

  // Stream one user below the gate through each percentile variant.
  bool frozen = true;
  for (Variant v : {Variant::kMulti, Variant::kValueWeighted, Variant::kBootstrapped,
                    Variant::kCotrain}) {
    TrainConfig cfg;
    cfg.variant = v;
    cfg.input_dim = kInput;
    cfg.seed = 7;
    Trainer trainer(cfg);
    Interaction r;
    r.features.assign(kInput, 0.4);
    for (std::uint64_t s = 0; s < cfg.gate_threshold; ++s) {
      r.ts = s;
      r.y = 1.0 + s;
      const Dense before = trainer.model().params().percentile_head;
      trainer.Step(r);
      frozen = frozen && trainer.model().params().percentile_head == before;
    }
  }
  return {worst < 1e-4 && frozen,
          "max rel err " + Fmt("%.2e", worst) +
              (frozen ? ", gated steps bit-identical" : ", gated step moved the head"),
          "< 1e-4 over 100 triples; bit-identical head"};
}

// Per-user ROC-AUC by exhaustive pair comparison, averaged over users.
double MeanUserAuc(const std::map<UserId, std::vector<std::pair<double, double>>>& by_user) {
  double sum = 0.0;
  int users = 0;
  for (const auto& [u, rows] : by_user) {
    double wins = 0.0, pairs = 0.0;
    for (const auto& [sp, lp] : rows) {
      if (lp != 1.0) continue;
      for (const auto& [sn, ln] : rows) {
        if (ln != 0.0) continue;
        pairs += 1;
        wins += sp > sn ? 1.0 : sp == sn ? 0.5 : 0.0;
      }
    }
    if (pairs > 0) sum += wins / pairs, ++users;
  }
  return users ? sum / users : NAN;
}

// Per-user fraction of all distinct-magnitude pairs ordered correctly.
double MeanUserRegAuc(const std::vector<Interaction>& rows, const std::vector<double>& scores,
                      const std::string& cohort) {
  std::map<UserId, std::vector<std::size_t>> idx;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (cohort == "all" || rows[i].cohort == cohort) idx[rows[i].user_id].push_back(i);
  }
  double sum = 0.0;
  int users = 0;
  for (const auto& [u, ids] : idx) {
    double agree = 0.0, pairs = 0.0;
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        const double dy = rows[ids[a]].y - rows[ids[b]].y;
        if (dy == 0.0) continue;
        const double ds = scores[ids[a]] - scores[ids[b]];
        pairs += 1;
        agree += ds == 0.0 ? 0.5 : ((ds > 0) == (dy > 0) ? 1.0 : 0.0);
      }
    }
    if (pairs > 0) sum += agree / pairs, ++users;
  }
  return users ? sum / users : NAN;
}

DualHeadModel LoadCheckpoint(const fs::path& p) { return LoadModel(io::ReadFile(p.string())); }

// 8. Bootstrapped labels keep resolution when every pool is all zeros.
Outcome SparseBinary(const fs::path& configs, const fs::path& work) {
  const ExperimentConfig config = LoadConfig((configs / "sparse_binary.json").string());
  const fs::path dir = work / "sparse_binary";
  fs::remove_all(dir);
  std::ostringstream log;
  CmdSimulate(config, dir.string(), log);
  const std::vector<Interaction> stream = LoadStream((dir / "stream.jsonl").string());

  std::size_t positives = 0;
  for (const Interaction& r : stream) positives += r.b;

  // Raw multi-sample labels against the binary target.
  TrainConfig multi = config.train;
  multi.variant = Variant::kMulti;
  const TrainResult raw = Train(stream, multi);
  double raw_min = 1.0, raw_max = 0.0;
  std::size_t raw_n = 0;
  for (const TrainRecord& r : raw.log) {
    if (!r.label) continue;
    raw_min = std::min(raw_min, *r.label), raw_max = std::max(raw_max, *r.label);
    ++raw_n;
  }
  bool pools_zero = true;
  for (const auto& [u, s] : raw.store.users()) {
    for (const PoolEntry& e : s.pool) pools_zero = pools_zero && e.magnitude == 0.0;
  }

  CmdTrain(config, (dir / "stream.jsonl").string(), dir.string(), log);
  std::vector<double> boot;
  {
    std::ifstream in(dir / "train_log.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      if (!j["label"].is_null()) boot.push_back(j["label"].get<double>());
    }
  }
  const double boot_sd = boot.size() > 1 ? std::sqrt(SampleVariance(boot)) : 0.0;

  // Percentile-head scores on the holdout against an affinity median split.
  const std::vector<Interaction> hold = LoadStream((dir / "holdout.jsonl").string());
  const DualHeadModel model = LoadCheckpoint(dir / "model.ckpt");
  std::map<UserId, std::vector<double>> aff;
  for (const Interaction& r : hold) aff[r.user_id].push_back(r.affinity);
  std::map<UserId, double> median;
  for (auto& [u, v] : aff) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    median[u] = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
  std::map<UserId, std::vector<std::pair<double, double>>> by_user;
  for (const Interaction& r : hold) {
    by_user[r.user_id].push_back(
        {model.Forward(r.features).p_hat, r.affinity > median[r.user_id] ? 1.0 : 0.0});
  }
  const double auc = MeanUserAuc(by_user);

  const bool ok = positives == 0 && pools_zero && raw_n > 0 && raw_max == 0.0 &&
                  raw_min == 0.0 && boot_sd > 0.0 && auc >= 0.55;
  return {ok,
          "positives " + std::to_string(positives) + ", raw labels in [" +
              Fmt("%g", raw_min) + ", " + Fmt("%g", raw_max) + "] over " +
              std::to_string(raw_n) + ", bootstrapped sd " + Fmt("%.4f", boot_sd) +
              ", affinity UAUC " + Fmt("%.4f", auc),
          "raw labels all 0; bootstrapped sd > 0; UAUC >= 0.55"};
}

void RunPipeline(const ExperimentConfig& config, const fs::path& dir) {
  fs::remove_all(dir);
  std::ostringstream log;
  CmdSimulate(config, dir.string(), log);
  CmdTrain(config, (dir / "stream.jsonl").string(), dir.string(), log);
  CmdEval(config, (dir / "model.ckpt").string(), (dir / "holdout.jsonl").string(),
          (dir / "baseline.ckpt").string(), dir.string(), log);
}

// 9. Percentile training helps the least active users most; the raw twin is
// near chance on them.
Outcome CohortPattern(const fs::path& configs, const fs::path& work) {
  const ExperimentConfig config = LoadConfig((configs / "default.json").string());
  const fs::path dir = work / "default_a";
  RunPipeline(config, dir);
  const std::vector<Interaction> hold = LoadStream((dir / "holdout.jsonl").string());
  const DualHeadModel model = LoadCheckpoint(dir / "model.ckpt");
  const DualHeadModel twin = LoadCheckpoint(dir / "baseline.ckpt");
  std::vector<double> s_model, s_twin;
  for (const Interaction& r : hold) {
    s_model.push_back(model.Forward(r.features).p_hat);
    s_twin.push_back(twin.Forward(r.features).y_hat);
  }
  const std::string lowest = config.population.cohorts.front().name;
  const std::string highest = config.population.cohorts.back().name;
  const double m_lo = MeanUserRegAuc(hold, s_model, lowest);
  const double t_lo = MeanUserRegAuc(hold, s_twin, lowest);
  const double m_hi = MeanUserRegAuc(hold, s_model, highest);
  const double t_hi = MeanUserRegAuc(hold, s_twin, highest);
  const double d_lo = m_lo - t_lo, d_hi = m_hi - t_hi;
  const bool ok = d_lo > d_hi && std::abs(t_lo - 0.5) <= 0.03;
  return {ok,
          lowest + ": percentile " + Fmt("%.4f", m_lo) + " twin " + Fmt("%.4f", t_lo) +
              " delta " + Fmt("%+.4f", d_lo) + "; " + highest + ": percentile " +
              Fmt("%.4f", m_hi) + " twin " + Fmt("%.4f", t_hi) + " delta " +
              Fmt("%+.4f", d_hi),
          "delta(" + lowest + ") > delta(" + highest + "); |twin(" + lowest +
              ") - 0.5| <= 0.03"};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 10. Two runs of the same config are byte-identical.
Outcome Determinism(const fs::path& configs, const fs::path& work) {
  const ExperimentConfig config = LoadConfig((configs / "default.json").string());
  const fs::path a = work / "default_a", b = work / "default_b";
  if (!fs::exists(a / "report.csv")) RunPipeline(config, a);
  RunPipeline(config, b);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(a)) names.push_back(entry.path().filename());
  std::sort(names.begin(), names.end());
  std::string differing;
  for (const std::string& n : names) {
    if (!fs::exists(b / n) || Slurp(a / n) != Slurp(b / n)) differing += " " + n;
  }
  std::size_t count_b = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(b)) ++count_b;
  const bool ok = differing.empty() && count_b == names.size() && names.size() >= 9;
  return {ok,
          std::to_string(names.size()) + " files compared" +
              (differing.empty() ? ", all identical" : ", differing:" + differing),
          "byte-identical stream, checkpoints, reports"};
}

}  // namespace
}  // namespace pctl

int main(int argc, char** argv) {
  CLI::App app{"pctl acceptance suite"};
  std::string workdir = "acceptance_work";
  std::string configs = "configs";
  app.add_option("--workdir", workdir, "scratch directory for pipeline runs");
  app.add_option("--configs", configs, "directory holding default.json and sparse_binary.json")
      ->check(CLI::ExistingDirectory);
  CLI11_PARSE(app, argc, argv);
  namespace fs = std::filesystem;
  fs::create_directories(workdir);

  using pctl::Report;
  bool ok = true;
  ok &= Report(1, "single-sample indicator unbiased", 30, pctl::Unbiasedness);
  ok &= Report(2, "multi-sample variance reduction", 30, pctl::VarianceReduction);
  ok &= Report(3, "MBCE/VWBCE linearity", 10, pctl::Linearity);
  ok &= Report(4, "soft-BCE minimizer", 0, pctl::SoftBceMinimizer);
  ok &= Report(5, "value-weighted optimum", 60, pctl::ValueWeightedOptimum);
  ok &= Report(6, "reservoir uniformity", 0, pctl::ReservoirUniformity);
  ok &= Report(7, "gradient correctness and gating", 0, pctl::Gradients);
  ok &= Report(8, "bootstrapped non-degeneracy", 0,
               [&] { return pctl::SparseBinary(configs, workdir); });
  ok &= Report(9, "cohort debiasing pattern", 600,
               [&] { return pctl::CohortPattern(configs, workdir); });
  ok &= Report(10, "determinism", 0, [&] { return pctl::Determinism(configs, workdir); });
  std::cout << (ok ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return ok ? 0 : 1;
}
