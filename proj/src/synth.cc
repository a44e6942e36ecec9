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

#include "pctl/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "json.hpp"
#include "pctl/errors.h"
#include "pctl/rng.h"

namespace pctl {

std::vector<Cohort> DefaultCohorts() {
  return {
      {"non_live", 0.40, 0.5, 1.0, 1.0, 0.02, 0},
      {"low", 0.30, 1.5, 1.0, 3.0, 0.05, 1},
      {"mid", 0.20, 2.5, 1.0, 8.0, 0.10, 2},
      {"high", 0.10, 3.5, 1.0, 20.0, 0.20, 3},
  };
}

void PopulationConfig::Validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ValidationError("population." + field + ": " + why);
  };
  if (users == 0) fail("users", "must be >= 1");
  if (items < 2) fail("items", "must be >= 2");
  if (cohorts.empty()) fail("cohorts", "must not be empty");
  if (taste_dims == 0) fail("taste_dims", "must be >= 1");
  if (stream_length == 0) fail("stream_length", "must be >= 1");
  if (holdout_items > items) fail("holdout_items", "exceeds item count");
  if (!(mu_jitter >= 0.0)) fail("mu_jitter", "must be >= 0");
  if (!(shared_taste >= 0.0)) fail("shared_taste", "must be >= 0");
  if (!(context_period > 0.0)) fail("context_period", "must be > 0");
  if (!std::isfinite(beta)) fail("beta", "must be finite");
  double total = 0.0;
  for (std::size_t c = 0; c < cohorts.size(); ++c) {
    const Cohort& k = cohorts[c];
    const std::string at = "cohorts[" + std::to_string(c) + "].";
    if (k.name.empty()) fail(at + "name", "must not be empty");
    if (!(k.weight >= 0.0)) fail(at + "weight", "must be >= 0");
    if (!(k.sigma > 0.0)) fail(at + "sigma", "must be > 0");
    if (!(k.activity > 0.0)) fail(at + "activity", "must be > 0");
    if (!std::isfinite(k.mu)) fail(at + "mu", "must be finite");
    if (!(k.positive_rate >= 0.0 && k.positive_rate <= 1.0)) {
      fail(at + "positive_rate", "must be in [0, 1]");
    }
    if (k.taste_axis >= taste_dims) fail(at + "taste_axis", "must be < taste_dims");
    total += k.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail("cohorts", "weights sum to " + std::to_string(total) + ", expected 1");
  }
}

namespace {

double Logit(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(p / (1.0 - p));
}

}  // namespace

Population::Population(PopulationConfig config) : config_(std::move(config)) {
  config_.Validate();
  std::mt19937_64 rng(MixSeed(config_.seed, 0x706f70));
  std::normal_distribution<double> normal(0.0, 1.0);

  // Cohort sizes by largest remainder so shares are exact and deterministic.
  const std::size_t n_cohorts = config_.cohorts.size();
  std::vector<std::size_t> counts(n_cohorts);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < n_cohorts; ++c) {
    const double exact = config_.cohorts[c].weight * config_.users;
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[c];
    remainders.push_back({exact - counts[c], c});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < config_.users; ++i, ++assigned) {
    ++counts[remainders[i % n_cohorts].second];
  }

  const double shared = config_.shared_taste;
  UserId next_id = 0;
  for (std::size_t c = 0; c < n_cohorts; ++c) {
    const Cohort& k = config_.cohorts[c];
    for (std::size_t n = 0; n < counts[c]; ++n) {
      UserProfile u;
      u.id = next_id++;
      u.cohort = c;
      u.mu = k.mu + config_.mu_jitter * normal(rng);
      u.sigma = k.sigma;
      u.activity = k.activity;
      u.binary_offset = Logit(k.positive_rate);
      u.taste.assign(config_.taste_dims, 0.0);
      for (double& t : u.taste) t = shared * normal(rng);
      u.taste[k.taste_axis] += normal(rng);
      users_.push_back(std::move(u));
    }
  }
  // Keep affinity roughly unit variance whatever the shared weight is.
  const double scale =
      1.0 / std::sqrt(1.0 + shared * shared * config_.taste_dims);
  for (UserProfile& u : users_) {
    for (double& t : u.taste) t *= scale;
  }

  items_.resize(config_.items);
  for (std::size_t i = 0; i < config_.items; ++i) {
    items_[i].id = i;
    items_[i].factors.resize(config_.taste_dims);
    for (double& f : items_[i].factors) f = normal(rng);
  }
}

const UserProfile& Population::user(UserId id) const {
  if (id >= users_.size()) {
    throw LookupError("unknown user " + std::to_string(id));
  }
  return users_[id];
}

const std::string& Population::cohort_name(UserId id) const {
  return config_.cohorts[user(id).cohort].name;
}

double Population::Affinity(UserId user_id, std::uint64_t item) const {
  const UserProfile& u = user(user_id);
  const std::vector<double>& f = items_.at(item).factors;
  double a = 0.0;
  for (std::size_t d = 0; d < f.size(); ++d) a += u.taste[d] * f[d];
  return a;
}

std::vector<double> Population::Features(UserId user_id, std::uint64_t item,
                                         std::uint64_t ts) const {
  const UserProfile& u = user(user_id);
  const std::vector<double>& f = items_.at(item).factors;
  std::vector<double> x;
  x.reserve(config_.feature_dim());
  // User block: activity level, engagement scale, taste.
  x.push_back(std::log(u.activity) / 3.0);
  x.push_back(u.mu / 2.0);
  x.insert(x.end(), u.taste.begin(), u.taste.end());
  // Item block.
  x.insert(x.end(), f.begin(), f.end());
  // Context block: time-of-day phase.
  const double phase = 2.0 * std::numbers::pi *
                       std::fmod(static_cast<double>(ts), config_.context_period) /
                       config_.context_period;
  x.push_back(std::sin(phase));
  x.push_back(std::cos(phase));
  return x;
}

double Population::Magnitude(UserId user_id, std::uint64_t item,
                             double z) const {
  const UserProfile& u = user(user_id);
  return std::exp(u.mu + config_.beta * Affinity(user_id, item) + u.sigma * z);
}

Interaction Population::Draw(UserId user_id, std::uint64_t item,
                             std::uint64_t ts, std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const UserProfile& u = user(user_id);
  Interaction r;
  r.user_id = user_id;
  r.item_id = item;
  r.ts = ts;
  r.features = Features(user_id, item, ts);
  r.affinity = Affinity(user_id, item);
  r.y = Magnitude(user_id, item, normal(rng));
  const double draw = unit(rng);
  r.b = std::isinf(u.binary_offset)
            ? (u.binary_offset > 0 ? 1 : 0)
            : (draw < 1.0 / (1.0 + std::exp(-(r.affinity + u.binary_offset))));
  r.cohort = config_.cohorts[u.cohort].name;
  return r;
}

namespace {

std::discrete_distribution<std::size_t> ActivityDistribution(
    const Population& p) {
  std::vector<double> w;
  w.reserve(p.users().size());
  for (const UserProfile& u : p.users()) w.push_back(u.activity);
  return {w.begin(), w.end()};
}

}  // namespace

StreamGenerator::StreamGenerator(const Population& population)
    : population_(&population),
      rng_(MixSeed(population.config().seed, 0x737472)),
      pick_user_(ActivityDistribution(population)),
      pick_item_(0, population.config().items - 1) {}

Interaction StreamGenerator::Next() {
  const UserId user = pick_user_(rng_);
  const std::uint64_t item = pick_item_(rng_);
  return population_->Draw(user, item, emitted_++, rng_);
}

std::vector<Interaction> GenerateStream(const Population& population) {
  StreamGenerator gen(population);
  std::vector<Interaction> out;
  out.reserve(population.config().stream_length);
  while (!gen.Done()) out.push_back(gen.Next());
  return out;
}

std::vector<Interaction> GenerateHoldout(const Population& population) {
  const PopulationConfig& c = population.config();
  std::mt19937_64 rng(MixSeed(c.seed, 0x686f6c64));
  std::vector<std::uint64_t> items(c.items);
  for (std::size_t i = 0; i < c.items; ++i) items[i] = i;
  std::vector<Interaction> out;
  out.reserve(c.users * c.holdout_items);
  std::uint64_t ts = c.stream_length;
  for (const UserProfile& u : population.users()) {
    // Partial Fisher-Yates for a distinct slate.
    for (std::size_t k = 0; k < c.holdout_items; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, c.items - 1);
      std::swap(items[k], items[pick(rng)]);
      out.push_back(population.Draw(u.id, items[k], ts++, rng));
    }
  }
  return out;
}

PercentileOracle PercentileOracle::Build(const Population& population,
                                         std::span<const UserId> users,
                                         std::size_t draws) {
  if (draws == 0) throw ValidationError("oracle draws must be >= 1");
  std::vector<UserId> ids(users.begin(), users.end());
  if (ids.empty()) {
    for (const UserProfile& u : population.users()) ids.push_back(u.id);
  }
  PercentileOracle oracle;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::uint64_t> pick_item(
      0, population.config().items - 1);
  for (UserId id : ids) {
    population.user(id);  // validates id
    std::mt19937_64 rng(MixSeed(MixSeed(population.config().seed, 0x6f7263), id));
    std::vector<double> s(draws);
    for (double& v : s) {
      const std::uint64_t item = pick_item(rng);
      v = population.Magnitude(id, item, normal(rng));
    }
    std::sort(s.begin(), s.end());
    oracle.samples_[id] = std::move(s);
  }
  return oracle;
}

double PercentileOracle::TruePercentile(UserId user, double y) const {
  auto it = samples_.find(user);
  if (it == samples_.end()) {
    throw LookupError("no oracle for user " + std::to_string(user));
  }
  const std::vector<double>& s = it->second;
  const auto below = std::lower_bound(s.begin(), s.end(), y) - s.begin();
  return static_cast<double>(below) / static_cast<double>(s.size());
}

double PercentileOracle::Quantile(UserId user, double q) const {
  auto it = samples_.find(user);
  if (it == samples_.end()) {
    throw LookupError("no oracle for user " + std::to_string(user));
  }
  const std::vector<double>& s = it->second;
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(s.size() - 1);
  return s[static_cast<std::size_t>(std::llround(pos))];
}

double LognormalCdf(double y, double mu, double sigma) {
  if (y <= 0.0) return 0.0;
  return 0.5 * std::erfc(-(std::log(y) - mu) / (sigma * std::numbers::sqrt2));
}

void WriteJsonl(std::ostream& out, std::span<const Interaction> stream) {
  for (const Interaction& r : stream) {
    nlohmann::ordered_json j;
    j["user_id"] = r.user_id;
    j["item_id"] = r.item_id;
    j["ts"] = r.ts;
    j["features"] = r.features;
    j["y"] = r.y;
    j["b"] = r.b;
    j["cohort"] = r.cohort;
    j["hidden_affinity"] = r.affinity;
    out << j.dump() << '\n';
  }
}

std::vector<Interaction> ReadJsonl(std::istream& in) {
  std::vector<Interaction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Interaction r;
      r.user_id = j.at("user_id").get<UserId>();
      r.item_id = j.at("item_id").get<std::uint64_t>();
      r.ts = j.at("ts").get<std::uint64_t>();
      r.features = j.at("features").get<std::vector<double>>();
      r.y = j.at("y").get<double>();
      r.b = j.at("b").get<int>();
      if (j.contains("cohort")) r.cohort = j["cohort"].get<std::string>();
      if (j.contains("hidden_affinity")) {
        r.affinity = j["hidden_affinity"].get<double>();
      }
      if (!(r.y >= 0.0) || !std::isfinite(r.y)) {
        throw ValidationError("y must be finite and >= 0");
      }
      if (r.b != 0 && r.b != 1) throw ValidationError("b must be 0 or 1");
      for (double f : r.features) {
        if (!std::isfinite(f)) throw ValidationError("non-finite feature");
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("stream line " + std::to_string(line_no) + ": " +
                            e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("stream line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return out;
}

void WriteOracleCsv(std::ostream& out, const Population& population,
                    const PercentileOracle& oracle) {
  out << "user_id,cohort,quantile,magnitude\n";
  char buf[64];
  for (const UserProfile& u : population.users()) {
    if (!oracle.Has(u.id)) continue;
    for (int q = 1; q <= 99; ++q) {
      std::snprintf(buf, sizeof(buf), "%.17g", oracle.Quantile(u.id, q / 100.0));
      out << u.id << ',' << population.cohort_name(u.id) << ',' << q / 100.0
          << ',' << buf << '\n';
    }
  }
}

}  // namespace pctl
