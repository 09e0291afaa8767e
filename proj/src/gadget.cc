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

#include "dirtysim/gadget.h"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dirtysim/measurement.h"
#include "dirtysim/rng.h"

namespace dirtysim {

namespace {

// Victim tags: line 0 is tag 0 in set i; line 1 is tag 0 in set i (same
// line), tag 1 in set i, or tag 0 in set j. Attacker prime lines use tags
// [0, W); replacement lines start at tag W.
LineRef victim_line(const GadgetConfig& cfg, unsigned which) {
  const CacheGeometry& g = cfg.geometry;
  if (which == 0) return {kVictim, g.line_address(cfg.set_i, 0)};
  switch (cfg.placement) {
    case LinePlacement::kSameLine:
      return {kVictim, g.line_address(cfg.set_i, 0)};
    case LinePlacement::kSameSetDistinct:
      return {kVictim, g.line_address(cfg.set_i, 1)};
    case LinePlacement::kDistinctSets:
      break;
  }
  return {kVictim, g.line_address(cfg.set_j(), 0)};
}

void prime(Cache& cache, const GadgetConfig& cfg, unsigned set, AccessKind kind) {
  for (unsigned w = 0; w < cfg.geometry.associativity; ++w) {
    cache.access({kAttacker, cfg.geometry.line_address(set, w)}, kind);
  }
}

Cycles observe(const GadgetConfig& cfg, unsigned secret) {
  Cache cache(cfg.geometry, cfg.policy, cfg.latency, Rng::Derive(cfg.seed, {1}).next());
  switch (cfg.scenario) {
    case GadgetScenario::kSetStateDirty:
    case GadgetScenario::kPrimeWithDirty: {
      const AccessKind kind =
          cfg.scenario == GadgetScenario::kSetStateDirty ? AccessKind::kRead : AccessKind::kWrite;
      prime(cache, cfg, cfg.set_i, kind);
      run_victim(cache, cfg, secret);
      const ReplacementSet rset =
          build_replacement_set(cfg.geometry, kAttacker, cfg.set_i, cfg.replacement_size,
                                Rng::Derive(cfg.seed, {2}).next(), cfg.geometry.associativity);
      return measure_replacement_latency(cache, rset).total_cycles;
    }
    case GadgetScenario::kVictimTiming:
      prime(cache, cfg, cfg.set_i, AccessKind::kWrite);
      prime(cache, cfg, cfg.set_j(), AccessKind::kRead);
      return run_victim(cache, cfg, secret);
  }
  return 0;
}

}  // namespace

std::string_view to_string(GadgetVariant v) { return v == GadgetVariant::kListingA ? "a" : "b"; }

std::string_view to_string(GadgetScenario s) {
  switch (s) {
    case GadgetScenario::kSetStateDirty:
      return "set-state-dirty";
    case GadgetScenario::kPrimeWithDirty:
      return "prime-with-dirty";
    case GadgetScenario::kVictimTiming:
      return "victim-timing";
  }
  return "?";
}

std::string_view to_string(LinePlacement p) {
  switch (p) {
    case LinePlacement::kSameLine:
      return "same-line";
    case LinePlacement::kSameSetDistinct:
      return "same-set";
    case LinePlacement::kDistinctSets:
      return "distinct-sets";
  }
  return "?";
}

GadgetVariant parse_variant(std::string_view s) {
  if (s == "a" || s == "A") return GadgetVariant::kListingA;
  if (s == "b" || s == "B") return GadgetVariant::kListingB;
  throw std::invalid_argument("unknown gadget variant '" + std::string(s) + "'");
}

GadgetScenario parse_scenario(std::string_view s) {
  if (s == "1" || s == "set-state-dirty") return GadgetScenario::kSetStateDirty;
  if (s == "2" || s == "prime-with-dirty") return GadgetScenario::kPrimeWithDirty;
  if (s == "3" || s == "victim-timing") return GadgetScenario::kVictimTiming;
  throw std::invalid_argument("unknown gadget scenario '" + std::string(s) + "'");
}

LinePlacement parse_placement(std::string_view s) {
  if (s == "same-line") return LinePlacement::kSameLine;
  if (s == "same-set") return LinePlacement::kSameSetDistinct;
  if (s == "distinct-sets") return LinePlacement::kDistinctSets;
  throw std::invalid_argument("unknown line placement '" + std::string(s) + "'");
}

void GadgetConfig::validate() const {
  geometry.validate();
  if (geometry.num_sets < 2) throw std::invalid_argument("gadgets need at least two sets");
  if (set_i >= geometry.num_sets) throw std::invalid_argument("set i out of range");
  if (replacement_size == 0) throw std::invalid_argument("replacement set size must be >= 1");
  switch (scenario) {
    case GadgetScenario::kSetStateDirty:
      if (variant != GadgetVariant::kListingA) {
        throw std::invalid_argument("set-state-dirty needs listing A (the victim must write)");
      }
      break;
    case GadgetScenario::kPrimeWithDirty:
      if (variant != GadgetVariant::kListingB) {
        throw std::invalid_argument("prime-with-dirty needs listing B (a write would re-dirty set i)");
      }
      if (placement != LinePlacement::kDistinctSets) {
        throw std::invalid_argument("prime-with-dirty needs line 0 and line 1 in different cache sets");
      }
      break;
    case GadgetScenario::kVictimTiming:
      if (placement != LinePlacement::kDistinctSets) {
        throw std::invalid_argument("victim-timing needs line 0 and line 1 in different cache sets");
      }
      break;
  }
}

Cycles run_victim(Cache& cache, const GadgetConfig& cfg, unsigned secret) {
  if (secret != 0) {
    const AccessKind kind = cfg.variant == GadgetVariant::kListingA ? AccessKind::kWrite : AccessKind::kRead;
    return cache.access(victim_line(cfg, 0), kind).latency;
  }
  return cache.access(victim_line(cfg, 1), AccessKind::kRead).latency;
}

GadgetResult run_gadget_attack(const GadgetConfig& cfg, unsigned secret) {
  cfg.validate();
  if (secret > 1) throw std::invalid_argument("secret must be 0 or 1");
  GadgetResult r;
  r.secret = secret;
  r.profile_secret0 = observe(cfg, 0);
  r.profile_secret1 = observe(cfg, 1);
  r.threshold = (static_cast<double>(r.profile_secret0) + static_cast<double>(r.profile_secret1)) / 2.0;
  r.observed = observe(cfg, secret);
  r.inferred = std::llabs(r.observed - r.profile_secret1) < std::llabs(r.observed - r.profile_secret0) ? 1 : 0;
  return r;
}

}  // namespace dirtysim
