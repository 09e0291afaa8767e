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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "oracles.h"

namespace dirtysim {
namespace {

CacheGeometry one_set() {
  CacheGeometry g;
  g.num_sets = 1;
  return g;
}

Cache prepared(unsigned d, const CacheGeometry& g) {
  Cache cache(g, PolicyKind::kTrueLru, LatencyModel{}, 0);
  for (unsigned i = 0; i < g.associativity; ++i) cache.access({kReceiver, g.line_address(0, i)}, AccessKind::kRead);
  for (unsigned j = 0; j < d; ++j) cache.access({kSender, g.line_address(0, j)}, AccessKind::kWrite);
  return cache;
}

TEST(ReplacementSetTest, LinesAreDistinctAndInTargetSet) {
  CacheGeometry g;
  const ReplacementSet r = build_replacement_set(g, kReceiver, 5, 10, 99, 8);
  ASSERT_EQ(r.lines.size(), 10u);
  std::set<std::uint64_t> addrs;
  for (const LineRef& l : r.lines) {
    EXPECT_EQ(g.set_index(l.address), 5u);
    addrs.insert(l.address);
  }
  EXPECT_EQ(addrs.size(), 10u);
  std::vector<unsigned> order = r.chase_order;
  std::sort(order.begin(), order.end());
  for (unsigned i = 0; i < 10; ++i) EXPECT_EQ(order[i], i);
}

TEST(ReplacementSetTest, SeedControlsChaseOrder) {
  CacheGeometry g;
  const auto a = build_replacement_set(g, kReceiver, 0, 10, 1);
  const auto b = build_replacement_set(g, kReceiver, 0, 10, 1);
  EXPECT_EQ(a.chase_order, b.chase_order);
}

TEST(MeasureTest, DocumentedTotals) {
  const CacheGeometry g = one_set();
  const auto rset = build_replacement_set(g, kReceiver, 0, 10, 4, g.associativity);
  for (auto [d, expected] : {std::pair{0u, 110}, {3u, 143}, {8u, 198}}) {
    Cache cache = prepared(d, g);
    const LatencySample s = measure_replacement_latency(cache, rset);
    EXPECT_EQ(s.total_cycles, expected) << "d=" << d;
    EXPECT_EQ(s.dirty_before, d);
    EXPECT_FALSE(s.precondition_violated());
    EXPECT_EQ(cache.dirty_count(0), 0u);
  }
}

TEST(MeasureTest, AgreesWithLruWalkOracle) {
  const CacheGeometry g = one_set();
  for (unsigned len = 1; len <= 16; ++len) {
    const auto rset = build_replacement_set(g, kReceiver, 0, len, len, g.associativity);
    for (unsigned d = 0; d <= 8; ++d) {
      Cache cache = prepared(d, g);
      EXPECT_EQ(measure_replacement_latency(cache, rset).total_cycles,
                oracle::lru_walk_total(8, d, len, 11, 22, 4))
          << "L=" << len << " d=" << d;
    }
  }
}

TEST(MeasureTest, SingleLineReplacementSet) {
  const CacheGeometry g = one_set();
  const auto rset = build_replacement_set(g, kReceiver, 0, 1, 0, g.associativity);
  Cache clean = prepared(0, g);
  EXPECT_EQ(measure_replacement_latency(clean, rset).total_cycles, 11);
  Cache dirty = prepared(8, g);
  EXPECT_EQ(measure_replacement_latency(dirty, rset).total_cycles, 22);
}

TEST(MeasureTest, TimerOverheadIsAdded) {
  const CacheGeometry g = one_set();
  const auto rset = build_replacement_set(g, kReceiver, 0, 10, 0, g.associativity);
  Cache cache = prepared(2, g);
  EXPECT_EQ(measure_replacement_latency(cache, rset, 30).total_cycles, 110 + 22 + 30);
}

TEST(MeasureTest, FlagsResidentLines) {
  const CacheGeometry g = one_set();
  const auto rset = build_replacement_set(g, kReceiver, 0, 10, 0, 0);  // overlaps the init lines
  Cache cache = prepared(0, g);
  EXPECT_TRUE(measure_replacement_latency(cache, rset).precondition_violated());
}

TEST(LatencyCdfTest, LruGivesPointMasses) {
  CdfSetup setup;
  const std::vector<unsigned> ds{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto rows = latency_cdf(setup, ds, 20, 7);
  ASSERT_EQ(rows.size(), ds.size() * 20);
  for (const CdfRow& r : rows) EXPECT_EQ(r.total_cycles, 110 + 11 * static_cast<Cycles>(r.d));
}

TEST(LatencyCdfTest, RandomPolicyIsSeededAndOrderedInMean) {
  CdfSetup setup;
  setup.policy = PolicyKind::kRandom;
  const std::vector<unsigned> ds{0, 4, 8};
  const auto a = latency_cdf(setup, ds, 200, 3);
  const auto b = latency_cdf(setup, ds, 200, 3);
  ASSERT_EQ(a.size(), b.size());
  double mean[3] = {};
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].total_cycles, b[i].total_cycles);
    mean[i / 200] += static_cast<double>(a[i].total_cycles) / 200.0;
  }
  EXPECT_LT(mean[0], mean[1]);
  EXPECT_LT(mean[1], mean[2]);
}

TEST(LatencyCdfTest, CsvHeader) {
  std::ostringstream out;
  const std::vector<CdfRow> rows{{2, 0, 132}};
  write_cdf_csv(out, rows);
  EXPECT_EQ(out.str(), "d,trial,total_cycles\n2,0,132\n");
}

}  // namespace
}  // namespace dirtysim
