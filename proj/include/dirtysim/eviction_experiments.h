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

#ifndef DIRTYSIM_EVICTION_EXPERIMENTS_H_
#define DIRTYSIM_EVICTION_EXPERIMENTS_H_

#include <cstdint>

#include "dirtysim/policy.h"

namespace dirtysim {

struct EvictionExperimentResult {
  unsigned replacement_size = 0;  // N or L
  unsigned dirty_count = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double evicted_fraction = 0.0;
};

// Per trial: a full set of unrelated lines with uniformly random policy
// metadata, a write to line 0, then N fresh lines. Counts trials in which
// line 0 left the set. Rejects N == 0, N > 4W and trials == 0.
EvictionExperimentResult eviction_distance_experiment(PolicyKind policy, unsigned n,
                                                      std::uint64_t trials, std::uint64_t seed,
                                                      unsigned ways = 8);

// Random replacement only. Per trial: d dirty lines and W - d clean lines fill
// an empty set, then L fresh lines are read. Counts trials in which at least
// one dirty line was written back. Trial t draws from the same stream for
// every (d, L), so fractions are monotone in both arguments.
EvictionExperimentResult dirty_eviction_experiment(unsigned dirty, unsigned replacement_size,
                                                   std::uint64_t trials, std::uint64_t seed,
                                                   unsigned ways = 8);

// 1 - ((W - d) / W)^L
double analytic_dirty_eviction_probability(unsigned ways, unsigned dirty, unsigned replacement_size);

}  // namespace dirtysim

#endif  // DIRTYSIM_EVICTION_EXPERIMENTS_H_
