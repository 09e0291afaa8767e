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

#include "dirtysim/eviction_experiments.h"

#include <cmath>
#include <stdexcept>

#include "dirtysim/cache.h"

namespace dirtysim {

namespace {

CacheGeometry single_set(unsigned ways) {
  CacheGeometry g;
  g.num_sets = 1;
  g.associativity = ways;
  return g;
}

LineRef line(const CacheGeometry& g, ActorId actor, std::uint64_t tag) {
  return {actor, g.line_address(0, tag)};
}

EvictionExperimentResult finish(EvictionExperimentResult r) {
  r.evicted_fraction = static_cast<double>(r.successes) / static_cast<double>(r.trials);
  return r;
}

}  // namespace

EvictionExperimentResult eviction_distance_experiment(PolicyKind policy, unsigned n,
                                                      std::uint64_t trials, std::uint64_t seed,
                                                      unsigned ways) {
  if (n == 0) throw std::invalid_argument("replacement set size must be >= 1");
  if (n > 4 * ways) throw std::invalid_argument("replacement set size exceeds 4 * associativity");
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");

  const CacheGeometry g = single_set(ways);
  EvictionExperimentResult result{n, 1, trials, 0, 0.0};
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::Derive(seed, {t});
    Cache cache(g, policy, LatencyModel{}, rng.next());
    for (unsigned w = 0; w < ways; ++w) cache.access(line(g, kOther, w), AccessKind::kRead);
    cache.policy().randomize(0, rng);

    const LineRef target = line(g, kReceiver, 0);
    cache.access(target, AccessKind::kWrite);
    for (unsigned i = 1; i <= n; ++i) cache.access(line(g, kReceiver, i), AccessKind::kRead);
    if (!cache.contains(target)) ++result.successes;
  }
  return finish(result);
}

EvictionExperimentResult dirty_eviction_experiment(unsigned dirty, unsigned replacement_size,
                                                   std::uint64_t trials, std::uint64_t seed,
                                                   unsigned ways) {
  if (dirty > ways) throw std::invalid_argument("dirty count exceeds associativity");
  if (replacement_size == 0) throw std::invalid_argument("replacement set size must be >= 1");
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");

  const CacheGeometry g = single_set(ways);
  EvictionExperimentResult result{replacement_size, dirty, trials, 0, 0.0};
  for (std::uint64_t t = 0; t < trials; ++t) {
    Cache cache(g, PolicyKind::kRandom, LatencyModel{}, Rng::Derive(seed, {t}).next());
    // The set starts empty, so these fills take invalid ways and draw nothing.
    for (unsigned i = 0; i < dirty; ++i) cache.access(line(g, kSender, i), AccessKind::kWrite);
    for (unsigned i = dirty; i < ways; ++i) cache.access(line(g, kOther, i), AccessKind::kRead);

    bool evicted = false;
    for (unsigned i = 0; i < replacement_size; ++i) {
      evicted |= cache.access(line(g, kReceiver, i), AccessKind::kRead).writeback;
    }
    if (evicted) ++result.successes;
  }
  return finish(result);
}

double analytic_dirty_eviction_probability(unsigned ways, unsigned dirty, unsigned replacement_size) {
  if (ways == 0) throw std::invalid_argument("associativity must be >= 1");
  if (dirty > ways) throw std::invalid_argument("dirty count exceeds associativity");
  const double keep = static_cast<double>(ways - dirty) / static_cast<double>(ways);
  return 1.0 - std::pow(keep, static_cast<double>(replacement_size));
}

}  // namespace dirtysim
