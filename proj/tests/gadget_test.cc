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

#include <gtest/gtest.h>

#include <tuple>

namespace dirtysim {
namespace {

using Combo = std::tuple<GadgetVariant, GadgetScenario, LinePlacement>;

GadgetConfig make(const Combo& c) {
  GadgetConfig cfg;
  std::tie(cfg.variant, cfg.scenario, cfg.placement) = c;
  cfg.seed = 17;
  return cfg;
}

bool valid(const GadgetConfig& cfg) {
  try {
    cfg.validate();
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

class GadgetRecoveryTest : public ::testing::TestWithParam<Combo> {};

TEST_P(GadgetRecoveryTest, RecoversSecretWhenValid) {
  GadgetConfig cfg = make(GetParam());
  if (!valid(cfg)) {
    EXPECT_THROW(run_gadget_attack(cfg, 0), std::invalid_argument);
    return;
  }
  for (PolicyKind policy : {PolicyKind::kTrueLru, PolicyKind::kTreePlru}) {
    cfg.policy = policy;
    for (unsigned secret : {0u, 1u}) {
      const GadgetResult r = run_gadget_attack(cfg, secret);
      EXPECT_EQ(r.inferred, secret);
      EXPECT_NE(r.profile_secret0, r.profile_secret1);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllCombos, GadgetRecoveryTest,
    ::testing::Combine(::testing::Values(GadgetVariant::kListingA, GadgetVariant::kListingB),
                       ::testing::Values(GadgetScenario::kSetStateDirty, GadgetScenario::kPrimeWithDirty,
                                         GadgetScenario::kVictimTiming),
                       ::testing::Values(LinePlacement::kSameLine, LinePlacement::kSameSetDistinct,
                                         LinePlacement::kDistinctSets)));

TEST(GadgetValidationTest, PairingRules) {
  EXPECT_FALSE(valid(make({GadgetVariant::kListingB, GadgetScenario::kSetStateDirty, LinePlacement::kDistinctSets})));
  EXPECT_FALSE(valid(make({GadgetVariant::kListingA, GadgetScenario::kPrimeWithDirty, LinePlacement::kDistinctSets})));
  EXPECT_FALSE(
      valid(make({GadgetVariant::kListingB, GadgetScenario::kPrimeWithDirty, LinePlacement::kSameSetDistinct})));
  EXPECT_FALSE(valid(make({GadgetVariant::kListingA, GadgetScenario::kVictimTiming, LinePlacement::kSameLine})));
  EXPECT_TRUE(valid(make({GadgetVariant::kListingB, GadgetScenario::kPrimeWithDirty, LinePlacement::kDistinctSets})));
  EXPECT_TRUE(valid(make({GadgetVariant::kListingA, GadgetScenario::kSetStateDirty, LinePlacement::kSameLine})));
}

TEST(GadgetTest, VictimTimingDifference) {
  GadgetConfig cfg = make({GadgetVariant::kListingB, GadgetScenario::kVictimTiming, LinePlacement::kDistinctSets});
  const GadgetResult r = run_gadget_attack(cfg, 1);
  EXPECT_EQ(r.profile_secret1 - r.profile_secret0, 11);
}

TEST(GadgetTest, RejectsNonBinarySecret) {
  EXPECT_THROW(run_gadget_attack(GadgetConfig{}, 2), std::invalid_argument);
}

TEST(GadgetTest, NamesRoundTrip) {
  EXPECT_EQ(parse_scenario("2"), GadgetScenario::kPrimeWithDirty);
  EXPECT_EQ(parse_scenario(to_string(GadgetScenario::kVictimTiming)), GadgetScenario::kVictimTiming);
  EXPECT_EQ(parse_placement(to_string(LinePlacement::kSameSetDistinct)), LinePlacement::kSameSetDistinct);
  EXPECT_EQ(parse_variant("B"), GadgetVariant::kListingB);
  EXPECT_THROW(parse_variant("c"), std::invalid_argument);
}

}  // namespace
}  // namespace dirtysim
