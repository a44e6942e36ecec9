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

#ifndef PCTL_SYNTH_H_
#define PCTL_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pctl/user_state.h"

namespace pctl {

// One activity segment of the population.
struct Cohort {
  std::string name;
  double weight = 0.25;        // share of users
  double mu = 1.0;             // log-space engagement scale
  double sigma = 1.0;          // log-space spread
  double activity = 1.0;       // relative interaction rate per user
  double positive_rate = 0.1;  // base rate of the sparse binary target
  std::size_t taste_axis = 0;  // item factor this segment mostly responds to
};

std::vector<Cohort> DefaultCohorts();

struct PopulationConfig {
  std::size_t users = 400;
  std::size_t items = 200;
  std::vector<Cohort> cohorts = DefaultCohorts();
  double beta = 0.8;          // affinity effect on log magnitude
  double mu_jitter = 0.25;    // per-user sd around the cohort mu
  double shared_taste = 0.5;  // weight of a taste component common to axes
  std::size_t taste_dims = 4;
  std::size_t stream_length = 180000;
  std::size_t holdout_items = 20;  // evaluation slate per user
  double context_period = 1000.0;
  std::uint64_t seed = 1;

  // Throws ValidationError naming the offending field.
  void Validate() const;
  std::size_t feature_dim() const { return 2 * taste_dims + 4; }
};

struct UserProfile {
  UserId id = 0;
  std::size_t cohort = 0;
  double mu = 0.0;
  double sigma = 1.0;
  double activity = 1.0;
  double binary_offset = 0.0;  // logit of the cohort positive rate
  std::vector<double> taste;
};

struct ItemProfile {
  std::uint64_t id = 0;
  std::vector<double> factors;
};

struct Interaction {
  UserId user_id = 0;
  std::uint64_t item_id = 0;
  std::uint64_t ts = 0;
  std::vector<double> features;
  double y = 0.0;        // continuous magnitude
  int b = 0;             // sparse binary target
  double affinity = 0.0; // hidden, oracle only
  std::string cohort;

  bool operator==(const Interaction&) const = default;
};

// Users, items, and the generative model tying them together.
class Population {
 public:
  explicit Population(PopulationConfig config);

  const PopulationConfig& config() const { return config_; }
  const std::vector<UserProfile>& users() const { return users_; }
  const std::vector<ItemProfile>& items() const { return items_; }
  const UserProfile& user(UserId id) const;
  const std::string& cohort_name(UserId id) const;

  double Affinity(UserId user, std::uint64_t item) const;
  std::vector<double> Features(UserId user, std::uint64_t item,
                               std::uint64_t ts) const;
  // y = exp(mu_u + beta * affinity + sigma_u * z)
  double Magnitude(UserId user, std::uint64_t item, double z) const;

  // Builds a full interaction, drawing noise from rng.
  Interaction Draw(UserId user, std::uint64_t item, std::uint64_t ts,
                   std::mt19937_64& rng) const;

 private:
  PopulationConfig config_;
  std::vector<UserProfile> users_;
  std::vector<ItemProfile> items_;
};

// Lazy, seeded training stream: users picked proportionally to activity,
// items uniformly, timestamps strictly increasing.
class StreamGenerator {
 public:
  explicit StreamGenerator(const Population& population);

  bool Done() const { return emitted_ >= population_->config().stream_length; }
  Interaction Next();

 private:
  const Population* population_;
  std::mt19937_64 rng_;
  std::discrete_distribution<std::size_t> pick_user_;
  std::uniform_int_distribution<std::uint64_t> pick_item_;
  std::size_t emitted_ = 0;
};

std::vector<Interaction> GenerateStream(const Population& population);

// Per-user evaluation slates of distinct items, timestamped after the stream.
std::vector<Interaction> GenerateHoldout(const Population& population);

// Monte Carlo CDF of each user's magnitude distribution.
class PercentileOracle {
 public:
  static constexpr std::size_t kDefaultDraws = 100000;

  // Builds sorted samples for the listed users (all users when empty).
  static PercentileOracle Build(const Population& population,
                                std::span<const UserId> users = {},
                                std::size_t draws = kDefaultDraws);

  // Fraction of the user's oracle sample strictly below y.
  double TruePercentile(UserId user, double y) const;
  // Empirical quantile, q in [0, 1].
  double Quantile(UserId user, double q) const;
  bool Has(UserId user) const { return samples_.count(user) > 0; }

 private:
  std::map<UserId, std::vector<double>> samples_;
};

// Closed-form lognormal CDF, used where affinity plays no role.
double LognormalCdf(double y, double mu, double sigma);

// Stream and oracle export.
void WriteJsonl(std::ostream& out, std::span<const Interaction> stream);
std::vector<Interaction> ReadJsonl(std::istream& in);
void WriteOracleCsv(std::ostream& out, const Population& population,
                    const PercentileOracle& oracle);

}  // namespace pctl

#endif  // PCTL_SYNTH_H_
