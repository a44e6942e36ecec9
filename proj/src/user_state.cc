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

#include "pctl/user_state.h"

#include <algorithm>
#include <string>
#include <utility>

#include "pctl/binary_io.h"
#include "pctl/errors.h"

namespace pctl {

namespace {

const UserState kEmptyState{};

}  // namespace

StateStore::StateStore(StoreConfig config) : config_(config) {
  if (config_.capacity == 0) {
    throw ValidationError("pool capacity must be at least 1");
  }
  if (config_.gate_threshold == 0) {
    throw ValidationError("gate threshold must be at least 1");
  }
}

const UserState& StateStore::Peek(UserId user) const {
  auto it = users_.find(user);
  return it == users_.end() ? kEmptyState : it->second;
}

const UserState& StateStore::Update(UserId user, const PoolEntry& entry) {
  UserState& state = users_[user];
  SplitMix64 rng(MixSeed(MixSeed(config_.seed, user), state.counter));
  ReservoirUpdate(state, entry, config_.capacity, rng);
  return state;
}

void StateStore::Put(UserId user, UserState state) {
  users_[user] = std::move(state);
}

std::vector<std::uint8_t> SnapshotStore(const StateStore& store) {
  io::ByteWriter w;
  w.Magic(io::kStateMagic);
  w.BeginRecord();
  w.U64(store.config().capacity);
  w.U64(store.config().gate_threshold);
  w.U64(store.config().seed);
  w.U64(store.user_count());
  w.EndRecord();
  for (const auto& [user, state] : store.users()) {
    w.BeginRecord();
    w.U64(user);
    w.U64(state.counter);
    w.U64(state.pool.size());
    for (const PoolEntry& e : state.pool) {
      w.F64(e.magnitude);
      w.F64(e.prior_pred);
    }
    w.EndRecord();
  }
  return w.Take();
}

StateStore LoadStore(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  r.ExpectMagic(io::kStateMagic);

  r.BeginRecord();
  StoreConfig config;
  std::size_t at = r.offset();
  config.capacity = r.U64();
  if (config.capacity == 0) throw DecodeError(at, "capacity is zero");
  at = r.offset();
  config.gate_threshold = r.U64();
  if (config.gate_threshold == 0) throw DecodeError(at, "gate threshold is zero");
  config.seed = r.U64();
  const std::uint64_t user_count = r.U64();
  r.EndRecord();

  StateStore store(config);
  bool have_prev = false;
  UserId prev = 0;
  for (std::uint64_t n = 0; n < user_count; ++n) {
    r.BeginRecord();
    at = r.offset();
    const UserId user = r.U64();
    if (have_prev && user <= prev) {
      throw DecodeError(at, "user ids not strictly increasing");
    }
    have_prev = true;
    prev = user;

    UserState state;
    state.counter = r.U64();
    at = r.offset();
    const std::uint64_t pool_len = r.U64();
    const std::uint64_t expected =
        std::min<std::uint64_t>(state.counter, config.capacity);
    if (pool_len != expected) {
      throw DecodeError(at, "pool length " + std::to_string(pool_len) +
                                " != min(counter, capacity) = " +
                                std::to_string(expected));
    }
    state.pool.reserve(pool_len);
    for (std::uint64_t i = 0; i < pool_len; ++i) {
      at = r.offset();
      PoolEntry e;
      e.magnitude = r.F64();
      e.prior_pred = r.F64();
      if (!(e.magnitude >= 0.0) || !(e.prior_pred >= 0.0)) {
        throw DecodeError(at, "pool entry is negative or NaN");
      }
      state.pool.push_back(e);
    }
    r.EndRecord();
    store.Put(user, std::move(state));
  }
  r.ExpectEnd();
  return store;
}

}  // namespace pctl
