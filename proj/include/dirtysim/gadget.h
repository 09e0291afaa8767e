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

#ifndef DIRTYSIM_GADGET_H_
#define DIRTYSIM_GADGET_H_

#include <cstdint>
#include <string_view>

#include "dirtysim/cache.h"

namespace dirtysim {

// Victim functions with a secret-dependent branch:
//   kListingA: if (secret) modify line 0 else access line 1
//   kListingB: if (secret) access line 0 else access line 1
enum class GadgetVariant { kListingA, kListingB };

// kSetStateDirty:  attacker primes set i clean, times set i afterwards (A).
// kPrimeWithDirty: attacker primes set i with W dirty lines, times set i (B).
// kVictimTiming:   attacker primes set i dirty and set j clean, times the
//                  victim call itself (A or B).
enum class GadgetScenario { kSetStateDirty, kPrimeWithDirty, kVictimTiming };

// Where line 1 lives relative to line 0 (which is always in set i).
enum class LinePlacement { kSameLine, kSameSetDistinct, kDistinctSets };

std::string_view to_string(GadgetVariant v);
std::string_view to_string(GadgetScenario s);
std::string_view to_string(LinePlacement p);
// "a"/"b"; "set-state-dirty"/"prime-with-dirty"/"victim-timing" (or 1/2/3);
// "same-line"/"same-set"/"distinct-sets". Throw std::invalid_argument.
GadgetVariant parse_variant(std::string_view s);
GadgetScenario parse_scenario(std::string_view s);
LinePlacement parse_placement(std::string_view s);

struct GadgetConfig {
  GadgetVariant variant = GadgetVariant::kListingA;
  GadgetScenario scenario = GadgetScenario::kSetStateDirty;
  LinePlacement placement = LinePlacement::kDistinctSets;
  CacheGeometry geometry;
  PolicyKind policy = PolicyKind::kTrueLru;
  LatencyModel latency;
  unsigned set_i = 0;
  unsigned replacement_size = 10;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument for pairings that carry no signal:
  // kSetStateDirty needs listing A; kPrimeWithDirty needs listing B;
  // kPrimeWithDirty and kVictimTiming need line 0 and line 1 in different sets.
  void validate() const;
  unsigned set_j() const { return (set_i + 1) % geometry.num_sets; }
};

struct GadgetResult {
  unsigned secret = 0;
  unsigned inferred = 0;
  // What the attacker timed: a replacement walk of set i, or the victim call.
  Cycles observed = 0;
  // Profiled latencies for a victim run with secret 0 and secret 1.
  Cycles profile_secret0 = 0;
  Cycles profile_secret1 = 0;
  double threshold = 0.0;
};

// Cycles spent by one victim call.
Cycles run_victim(Cache& cache, const GadgetConfig& cfg, unsigned secret);

// The attacker first profiles the gadget with both secret values, then
// observes one call with the real secret and picks the closer profile.
GadgetResult run_gadget_attack(const GadgetConfig& cfg, unsigned secret);

}  // namespace dirtysim

#endif  // DIRTYSIM_GADGET_H_
