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

#include "dirtysim/measurement.h"

#include <numeric>
#include <stdexcept>

#include "dirtysim/rng.h"

namespace dirtysim {

ReplacementSet build_replacement_set(const CacheGeometry& geometry, ActorId actor, unsigned target_set,
                                     unsigned length, std::uint64_t seed, std::uint64_t first_tag) {
  if (length == 0) throw std::invalid_argument("replacement set must hold at least one line");
  if (target_set >= geometry.num_sets) throw std::invalid_argument("target set out of range");

  ReplacementSet rset{actor, target_set, {}, {}};
  rset.lines.reserve(length);
  for (unsigned i = 0; i < length; ++i) {
    rset.lines.push_back({actor, geometry.line_address(target_set, first_tag + i)});
  }
  rset.chase_order.resize(length);
  std::iota(rset.chase_order.begin(), rset.chase_order.end(), 0u);
  Rng rng(seed);
  rng.shuffle(rset.chase_order);
  return rset;
}

LatencySample measure_replacement_latency(Cache& cache, const ReplacementSet& rset,
                                          Cycles timer_overhead) {
  LatencySample sample;
  sample.dirty_before = cache.dirty_count(rset.target_set);
  sample.total_cycles = timer_overhead;
  for (unsigned idx : rset.chase_order) {
    const AccessOutcome outcome = cache.access(rset.lines[idx], AccessKind::kRead);
    if (outcome.kind == OutcomeKind::kHit) ++sample.l1_hits;
    sample.total_cycles += outcome.latency;
  }
  return sample;
}

std::vector<CdfRow> latency_cdf(const CdfSetup& setup, std::span<const unsigned> d_values,
                                std::uint64_t trials, std::uint64_t seed) {
  const CacheGeometry& g = setup.geometry;
  const unsigned ways = g.associativity;
  for (unsigned d : d_values) {
    if (d > ways) throw std::invalid_argument("d exceeds associativity");
  }
  if (setup.target_set >= g.num_sets) throw std::invalid_argument("target set out of range");

  // Receiver tags: init lines [0, W), replacement lines from W upward.
  std::vector<CdfRow> rows;
  rows.reserve(d_values.size() * trials);
  for (unsigned d : d_values) {
    for (std::uint64_t t = 0; t < trials; ++t) {
      Rng rng = Rng::Derive(seed, {d, t});
      Cache cache(g, setup.policy, setup.latency, rng.next());
      for (unsigned i = 0; i < ways; ++i) {
        cache.access({kReceiver, g.line_address(setup.target_set, i)}, AccessKind::kRead);
      }
      for (unsigned j = 0; j < d; ++j) {
        cache.access({kSender, g.line_address(setup.target_set, j)}, AccessKind::kWrite);
      }
      const ReplacementSet rset = build_replacement_set(g, kReceiver, setup.target_set,
                                                        setup.replacement_size, rng.next(), ways);
      rows.push_back({d, t, measure_replacement_latency(cache, rset).total_cycles});
    }
  }
  return rows;
}

void write_cdf_csv(std::ostream& out, std::span<const CdfRow> rows) {
  out << "d,trial,total_cycles\n";
  for (const CdfRow& r : rows) out << r.d << ',' << r.trial << ',' << r.total_cycles << '\n';
}

}  // namespace dirtysim
