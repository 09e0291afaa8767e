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

#ifndef DIRTYSIM_MEASUREMENT_H_
#define DIRTYSIM_MEASUREMENT_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "dirtysim/cache.h"

namespace dirtysim {

inline constexpr unsigned kDefaultReplacementSize = 10;

// L lines of one actor that all index target_set, walked in chase_order.
// The random order stands in for the shuffled linked list used on hardware
// to keep the prefetcher out of the measurement.
struct ReplacementSet {
  ActorId actor = 0;
  unsigned target_set = 0;
  std::vector<LineRef> lines;
  std::vector<unsigned> chase_order;
};

// Lines carry consecutive tags first_tag, first_tag + 1, ...; give disjoint
// tag ranges to sets that must not share addresses.
ReplacementSet build_replacement_set(const CacheGeometry& geometry, ActorId actor, unsigned target_set,
                                     unsigned length, std::uint64_t seed, std::uint64_t first_tag = 0);

struct LatencySample {
  unsigned dirty_before = 0;
  Cycles total_cycles = 0;
  // Accesses that hit in L1. Non-zero means the replacement set was
  // partly resident and the sample is not a clean replacement measurement.
  unsigned l1_hits = 0;

  bool precondition_violated() const { return l1_hits > 0; }
};

// Strictly serialized walk: total_cycles is the plain sum of the per-access
// latencies plus a constant timer overhead.
LatencySample measure_replacement_latency(Cache& cache, const ReplacementSet& rset,
                                          Cycles timer_overhead = 0);

struct CdfSetup {
  CacheGeometry geometry;
  PolicyKind policy = PolicyKind::kTrueLru;
  LatencyModel latency;
  unsigned target_set = 0;
  unsigned replacement_size = kDefaultReplacementSize;
};

struct CdfRow {
  unsigned d = 0;
  std::uint64_t trial = 0;
  Cycles total_cycles = 0;
};

// For each d and trial: fresh cache, receiver initializes the target set, the
// sender dirties d lines, and a fresh replacement set is timed. Rows are
// ordered by (d as given, trial).
std::vector<CdfRow> latency_cdf(const CdfSetup& setup, std::span<const unsigned> d_values,
                                std::uint64_t trials, std::uint64_t seed);

void write_cdf_csv(std::ostream& out, std::span<const CdfRow> rows);

}  // namespace dirtysim

#endif  // DIRTYSIM_MEASUREMENT_H_
