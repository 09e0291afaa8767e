// Copyright 2026 The dirtysim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIRTYSIM_CACHE_H_
#define DIRTYSIM_CACHE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "dirtysim/policy.h"
#include "dirtysim/rng.h"

namespace dirtysim {

using Cycles = std::int64_t;
using ActorId = std::uint32_t;

// Well-known address spaces. Any other id is also allowed.
inline constexpr ActorId kSender = 1;
inline constexpr ActorId kReceiver = 2;
inline constexpr ActorId kNoise = 3;
inline constexpr ActorId kVictim = 4;
inline constexpr ActorId kAttacker = 5;
inline constexpr ActorId kOther = 6;

enum class WritePolicy { kWriteBackAllocate, kWriteThroughNoAllocate };
enum class AccessKind { kRead, kWrite };
enum class OutcomeKind { kHit, kMissFillInvalid, kMissEvictClean, kMissEvictDirty, kUncached };

std::string_view to_string(OutcomeKind kind);

struct CacheGeometry {
  unsigned num_sets = 64;
  unsigned associativity = 8;
  unsigned line_size = 64;
  WritePolicy write_policy = WritePolicy::kWriteBackAllocate;
  // Actor -> permitted ways. Absent means every actor may use every way.
  std::optional<std::map<ActorId, std::vector<unsigned>>> partition;

  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  unsigned offset_bits() const;
  unsigned index_bits() const;
  unsigned set_index(std::uint64_t address) const;
  std::uint64_t tag_bits(std::uint64_t address) const;
  // Address of the line with the given tag in the given set (offset 0).
  std::uint64_t line_address(unsigned set, std::uint64_t tag) const;
};

// Access latencies in cycles. Jitter adds a uniform integer in
// [-jitter, +jitter] to every access, floored at one cycle.
struct LatencyModel {
  Cycles l1_hit = 4;
  Cycles evict_clean = 11;
  Cycles evict_dirty = 22;
  Cycles uncached_store = 11;
  int jitter = 0;

  Cycles base(OutcomeKind kind) const;
};

struct LineRef {
  ActorId actor = 0;
  std::uint64_t address = 0;
};

struct Tag {
  ActorId actor = 0;
  std::uint64_t bits = 0;
  friend bool operator==(const Tag&, const Tag&) = default;
};

struct LineState {
  bool valid = false;
  bool dirty = false;
  Tag tag;
  std::optional<std::uint64_t> policy_meta;
};

struct AccessOutcome {
  OutcomeKind kind = OutcomeKind::kHit;
  std::optional<unsigned> victim_way;
  bool writeback = false;
  Cycles latency = 0;
};

struct ActorCounters {
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t l1_hits = 0;
  std::uint64_t l1_misses = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t uncached = 0;
  friend bool operator==(const ActorCounters&, const ActorCounters&) = default;
};

struct EventCounters {
  std::map<ActorId, ActorCounters> per_actor;
  // Sum of all access latencies.
  Cycles cycles = 0;

  ActorCounters actor(ActorId id) const;
  std::uint64_t total_writebacks() const;
};

// Single-level set-associative cache backed by an always-hit next level.
// Lines are tagged with the owning actor, so distinct address spaces never
// alias. Not thread-safe; each simulation owns its own instance.
class Cache {
 public:
  Cache(CacheGeometry geometry, PolicyKind policy, LatencyModel latency, std::uint64_t seed);
  Cache(const Cache& other);
  Cache& operator=(const Cache& other);
  Cache(Cache&&) noexcept = default;
  Cache& operator=(Cache&&) noexcept = default;

  AccessOutcome access(const LineRef& line, AccessKind kind);

  std::vector<LineState> snapshot_set(unsigned set) const;
  bool contains(const LineRef& line) const;
  unsigned dirty_count(unsigned set) const;

  // All lines invalid, policy metadata and counters zeroed, generators reseeded.
  void reset();

  const CacheGeometry& geometry() const { return geometry_; }
  const LatencyModel& latency() const { return latency_; }
  const EventCounters& counters() const { return counters_; }
  ReplacementPolicy& policy() { return *policy_; }
  const ReplacementPolicy& policy() const { return *policy_; }

 private:
  struct Line {
    bool valid = false;
    bool dirty = false;
    Tag tag;
  };

  Line* row(unsigned set) { return &lines_[static_cast<std::size_t>(set) * geometry_.associativity]; }
  const Line* row(unsigned set) const {
    return &lines_[static_cast<std::size_t>(set) * geometry_.associativity];
  }
  const std::vector<unsigned>& allowed_ways(ActorId actor) const;
  std::optional<unsigned> find(unsigned set, const Tag& tag) const;
  Cycles charge(OutcomeKind kind);

  CacheGeometry geometry_;
  LatencyModel latency_;
  std::uint64_t seed_;
  std::unique_ptr<ReplacementPolicy> policy_;
  Rng jitter_rng_;
  std::vector<Line> lines_;
  std::vector<unsigned> all_ways_;
  EventCounters counters_;
};

}  // namespace dirtysim

#endif  // DIRTYSIM_CACHE_H_
