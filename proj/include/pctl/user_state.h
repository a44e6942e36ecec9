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

#ifndef PCTL_USER_STATE_H_
#define PCTL_USER_STATE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "pctl/rng.h"

namespace pctl {

using UserId = std::uint64_t;

// One historical reference kept in a contrastive pool.
struct PoolEntry {
  double magnitude = 0.0;   // raw target value of the historical interaction
  double prior_pred = 0.0;  // regression-head prediction when it was inserted

  bool operator==(const PoolEntry&) const = default;
};

// Per-user reservoir of historical targets plus the interaction counter.
// Invariant: pool.size() == min(counter, capacity).
struct UserState {
  std::vector<PoolEntry> pool;
  std::uint64_t counter = 0;

  bool operator==(const UserState&) const = default;
};

// Algorithm R step. The counter is incremented first; while the counter is
// within capacity the entry is appended, afterwards it overwrites a uniform
// slot with probability capacity / counter.
template <std::uniform_random_bit_generator Rng>
void ReservoirUpdate(UserState& state, const PoolEntry& entry,
                     std::size_t capacity, Rng& rng) {
  ++state.counter;
  if (state.counter <= capacity) {
    state.pool.push_back(entry);
    return;
  }
  std::uniform_int_distribution<std::uint64_t> pick(0, state.counter - 1);
  const std::uint64_t slot = pick(rng);
  if (slot < capacity) state.pool[slot] = entry;
}

// True iff the user has at least `gate_threshold` prior interactions. Callers
// pass the state as it was before the current interaction is inserted.
inline bool GatingAllows(const UserState& state, std::uint64_t gate_threshold) {
  return state.counter >= gate_threshold;
}

struct StoreConfig {
  std::size_t capacity = 50;
  std::uint64_t gate_threshold = 10;
  std::uint64_t seed = 0;

  bool operator==(const StoreConfig&) const = default;
};

// All per-user state. Replacement randomness for user u at counter m comes
// from a generator seeded with mix(seed, u, m), so results do not depend on
// the order in which different users are processed, and a restored snapshot
// continues exactly where the original left off.
class StateStore {
 public:
  StateStore() = default;
  explicit StateStore(StoreConfig config);

  const StoreConfig& config() const { return config_; }

  // Returns an empty state for users never seen.
  const UserState& Peek(UserId user) const;

  // Runs one reservoir update for `user` and returns the new state.
  const UserState& Update(UserId user, const PoolEntry& entry);

  // Replaces a user's state wholesale (used when loading snapshots).
  void Put(UserId user, UserState state);

  std::size_t user_count() const { return users_.size(); }
  const std::map<UserId, UserState>& users() const { return users_; }

  bool operator==(const StateStore&) const = default;

 private:
  StoreConfig config_;
  std::map<UserId, UserState> users_;
};

// Binary snapshot: 8-byte magic, then length-prefixed little-endian records.
std::vector<std::uint8_t> SnapshotStore(const StateStore& store);
StateStore LoadStore(std::span<const std::uint8_t> bytes);

}  // namespace pctl

#endif  // PCTL_USER_STATE_H_
