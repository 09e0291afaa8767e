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

#include "dirtysim/cache.h"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace dirtysim {

namespace {

bool power_of_two(unsigned v) { return v >= 1 && std::has_single_bit(v); }

}  // namespace

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kHit:
      return "hit";
    case OutcomeKind::kMissFillInvalid:
      return "miss_fill_invalid";
    case OutcomeKind::kMissEvictClean:
      return "miss_evict_clean";
    case OutcomeKind::kMissEvictDirty:
      return "miss_evict_dirty";
    case OutcomeKind::kUncached:
      return "uncached";
  }
  return "?";
}

void CacheGeometry::validate() const {
  if (!power_of_two(num_sets)) throw std::invalid_argument("num_sets must be a power of two");
  if (!power_of_two(associativity)) {
    throw std::invalid_argument("associativity must be a power of two");
  }
  if (!power_of_two(line_size)) throw std::invalid_argument("line_size must be a power of two");
  if (offset_bits() + index_bits() >= 64) {
    throw std::invalid_argument("line_size * num_sets does not fit a 64-bit address");
  }
  if (partition) {
    std::set<unsigned> taken;
    for (const auto& [actor, ways] : *partition) {
      if (ways.empty()) {
        throw std::invalid_argument("partition for actor " + std::to_string(actor) + " is empty");
      }
      for (unsigned way : ways) {
        if (way >= associativity) throw std::invalid_argument("partition way out of range");
        if (!taken.insert(way).second) {
          throw std::invalid_argument("partition way " + std::to_string(way) +
                                      " is assigned to more than one actor");
        }
      }
    }
  }
}

unsigned CacheGeometry::offset_bits() const { return static_cast<unsigned>(std::countr_zero(line_size)); }

unsigned CacheGeometry::index_bits() const { return static_cast<unsigned>(std::countr_zero(num_sets)); }

unsigned CacheGeometry::set_index(std::uint64_t address) const {
  return static_cast<unsigned>((address >> offset_bits()) & (num_sets - 1));
}

std::uint64_t CacheGeometry::tag_bits(std::uint64_t address) const {
  return address >> (offset_bits() + index_bits());
}

std::uint64_t CacheGeometry::line_address(unsigned set, std::uint64_t tag) const {
  return (tag << (offset_bits() + index_bits())) | (static_cast<std::uint64_t>(set) << offset_bits());
}

Cycles LatencyModel::base(OutcomeKind kind) const {
  switch (kind) {
    case OutcomeKind::kHit:
      return l1_hit;
    case OutcomeKind::kMissFillInvalid:
    case OutcomeKind::kMissEvictClean:
      return evict_clean;
    case OutcomeKind::kMissEvictDirty:
      return evict_dirty;
    case OutcomeKind::kUncached:
      return uncached_store;
  }
  return 0;
}

ActorCounters EventCounters::actor(ActorId id) const {
  auto it = per_actor.find(id);
  return it == per_actor.end() ? ActorCounters{} : it->second;
}

std::uint64_t EventCounters::total_writebacks() const {
  std::uint64_t total = 0;
  for (const auto& [id, c] : per_actor) total += c.writebacks;
  return total;
}

Cache::Cache(CacheGeometry geometry, PolicyKind policy, LatencyModel latency, std::uint64_t seed)
    : geometry_(std::move(geometry)),
      latency_(latency),
      seed_(seed),
      jitter_rng_(Rng::Derive(seed, {0x6a17})) {
  geometry_.validate();
  if (latency_.jitter < 0) throw std::invalid_argument("jitter must be >= 0");
  policy_ = make_policy(policy, geometry_.num_sets, geometry_.associativity, Rng::Derive(seed, {0x9011}).next());
  lines_.resize(static_cast<std::size_t>(geometry_.num_sets) * geometry_.associativity);
  all_ways_.resize(geometry_.associativity);
  std::iota(all_ways_.begin(), all_ways_.end(), 0u);
}

Cache::Cache(const Cache& other)
    : geometry_(other.geometry_),
      latency_(other.latency_),
      seed_(other.seed_),
      policy_(other.policy_->clone()),
      jitter_rng_(other.jitter_rng_),
      lines_(other.lines_),
      all_ways_(other.all_ways_),
      counters_(other.counters_) {}

Cache& Cache::operator=(const Cache& other) {
  if (this != &other) {
    Cache copy(other);
    *this = std::move(copy);
  }
  return *this;
}

const std::vector<unsigned>& Cache::allowed_ways(ActorId actor) const {
  if (!geometry_.partition) return all_ways_;
  auto it = geometry_.partition->find(actor);
  if (it == geometry_.partition->end()) {
    throw std::invalid_argument("actor " + std::to_string(actor) + " has no way partition");
  }
  return it->second;
}

std::optional<unsigned> Cache::find(unsigned set, const Tag& tag) const {
  const Line* lines = row(set);
  for (unsigned way = 0; way < geometry_.associativity; ++way) {
    if (lines[way].valid && lines[way].tag == tag) return way;
  }
  return std::nullopt;
}

Cycles Cache::charge(OutcomeKind kind) {
  Cycles cycles = latency_.base(kind);
  if (latency_.jitter > 0) {
    cycles += jitter_rng_.uniform_int(-latency_.jitter, latency_.jitter);
    cycles = std::max<Cycles>(cycles, 1);
  }
  counters_.cycles += cycles;
  return cycles;
}

AccessOutcome Cache::access(const LineRef& line, AccessKind kind) {
  const unsigned set = geometry_.set_index(line.address);
  const Tag tag{line.actor, geometry_.tag_bits(line.address)};
  const std::vector<unsigned>& ways = allowed_ways(line.actor);
  const bool write = kind == AccessKind::kWrite;
  const bool write_back = geometry_.write_policy == WritePolicy::kWriteBackAllocate;

  ActorCounters& counters = counters_.per_actor[line.actor];
  (write ? counters.stores : counters.loads) += 1;

  AccessOutcome outcome;
  Line* lines = row(set);
  if (auto way = find(set, tag)) {
    if (write && write_back) lines[*way].dirty = true;
    policy_->on_access(set, *way);
    ++counters.l1_hits;
    outcome.kind = OutcomeKind::kHit;
    outcome.latency = charge(outcome.kind);
    return outcome;
  }

  if (write && !write_back) {
    ++counters.uncached;
    outcome.kind = OutcomeKind::kUncached;
    outcome.latency = charge(outcome.kind);
    return outcome;
  }

  ++counters.l1_misses;
  auto invalid = std::find_if(ways.begin(), ways.end(), [lines](unsigned w) { return !lines[w].valid; });
  unsigned victim;
  if (invalid != ways.end()) {
    victim = *invalid;
    outcome.kind = OutcomeKind::kMissFillInvalid;
  } else {
    victim = policy_->select_victim(set, ways);
    if (lines[victim].dirty) {
      outcome.kind = OutcomeKind::kMissEvictDirty;
      outcome.writeback = true;
      ++counters.writebacks;
    } else {
      outcome.kind = OutcomeKind::kMissEvictClean;
    }
  }
  lines[victim] = Line{true, write && write_back, tag};
  policy_->on_access(set, victim);
  outcome.victim_way = victim;
  outcome.latency = charge(outcome.kind);
  return outcome;
}

std::vector<LineState> Cache::snapshot_set(unsigned set) const {
  if (set >= geometry_.num_sets) throw std::out_of_range("set index out of range");
  std::vector<LineState> out;
  out.reserve(geometry_.associativity);
  const Line* lines = row(set);
  for (unsigned way = 0; way < geometry_.associativity; ++way) {
    out.push_back({lines[way].valid, lines[way].dirty, lines[way].tag, policy_->line_meta(set, way)});
  }
  return out;
}

bool Cache::contains(const LineRef& line) const {
  return find(geometry_.set_index(line.address), Tag{line.actor, geometry_.tag_bits(line.address)})
      .has_value();
}

unsigned Cache::dirty_count(unsigned set) const {
  const Line* lines = row(set);
  return static_cast<unsigned>(
      std::count_if(lines, lines + geometry_.associativity, [](const Line& l) { return l.dirty; }));
}

void Cache::reset() {
  std::fill(lines_.begin(), lines_.end(), Line{});
  policy_->reset();
  jitter_rng_ = Rng::Derive(seed_, {0x6a17});
  counters_ = EventCounters{};
}

}  // namespace dirtysim
