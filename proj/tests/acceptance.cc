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

// Prints one PASS/FAIL line per acceptance criterion and exits non-zero when
// any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "cli.h"
#include "dirtysim/analysis.h"
#include "dirtysim/channel.h"
#include "dirtysim/eviction_experiments.h"
#include "dirtysim/gadget.h"
#include "dirtysim/measurement.h"
#include "dirtysim/rng.h"
#include "dirtysim/sweep.h"
#include "oracles.h"

namespace {

using namespace dirtysim;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

Check formula() {
  Check c;
  const double p = analytic_dirty_eviction_probability(8, 3, 10);
  c.expect(std::abs(p - 0.9909) <= 1e-4, fmt::format("P(8,3,10) = {:.6f}", p));
  c.detail = c.ok ? fmt::format("P(8,3,10) = {:.6f}", p) : c.detail;
  return c;
}

Check lru_distance() {
  Check c;
  const double f = eviction_distance_experiment(PolicyKind::kTrueLru, 8, 10000, 2024).evicted_fraction;
  c.expect(f == 1.0, fmt::format("fraction {:.4f}", f));
  if (c.ok) c.detail = "N=8 fraction 1.0000";
  return c;
}

Check plru_distance() {
  Check c;
  const double mc9 = eviction_distance_experiment(PolicyKind::kTreePlru, 9, 10000, 2024).evicted_fraction;
  const double enum9 = oracle::plru_eviction_fraction(8, 9);
  const double enum8 = oracle::plru_eviction_fraction(8, 8);
  const double mc8 = eviction_distance_experiment(PolicyKind::kTreePlru, 8, 10000, 2024).evicted_fraction;
  c.expect(mc9 == 1.0, fmt::format("N=9 Monte Carlo {:.4f}", mc9));
  c.expect(enum9 == 1.0, fmt::format("N=9 enumeration {:.4f}", enum9));
  c.expect(enum8 > 0.90 && enum8 < 1.00, fmt::format("N=8 enumeration {:.4f} outside (0.90, 1.00)", enum8));
  c.expect(std::abs(mc8 - enum8) <= 0.02, fmt::format("N=8 Monte Carlo {:.4f} vs enumeration {:.4f}", mc8, enum8));
  if (c.ok) c.detail = fmt::format("N=9 1.0 both ways, N=8 {:.4f}", enum8);
  return c;
}

Check dirty_grid() {
  Check c;
  double grid[2][6];
  for (unsigned i = 0; i < 2; ++i) {
    for (unsigned j = 0; j < 6; ++j) {
      const unsigned d = 2 + i;
      const unsigned l = 8 + j;
      grid[i][j] = dirty_eviction_experiment(d, l, 10000, 2024).evicted_fraction;
      const double p = analytic_dirty_eviction_probability(8, d, l);
      c.expect(grid[i][j] <= p + 0.01, fmt::format("d={} L={}: {:.4f} > analytic {:.4f} + 0.01", d, l, grid[i][j], p));
      if (j > 0) c.expect(grid[i][j - 1] <= grid[i][j], fmt::format("not monotone in L at d={} L={}", d, l));
      if (i > 0) c.expect(grid[i - 1][j] <= grid[i][j], fmt::format("not monotone in d at L={}", l));
    }
  }
  c.expect(grid[1][5] >= 0.99, fmt::format("d=3 L=13 {:.4f}", grid[1][5]));
  if (c.ok) c.detail = fmt::format("d=3 L=13 {:.4f}", grid[1][5]);
  return c;
}

Check latency_arithmetic() {
  Check c;
  CdfSetup setup;
  const std::vector<unsigned> ds{0, 1, 2, 3, 4, 5, 6, 7, 8};
  for (const CdfRow& r : latency_cdf(setup, ds, 10, 2024)) {
    const Cycles want = 110 + 11 * static_cast<Cycles>(r.d);
    c.expect(r.total_cycles == want, fmt::format("d={} total {} != {}", r.d, r.total_cycles, want));
  }
  if (c.ok) c.detail = "totals 110 + 11d for d = 0..8";
  return c;
}

Check rates() {
  Check c;
  c.expect(rate_kbps(1600, 1) == 1375.0, "1600/1");
  c.expect(rate_kbps(1000, 2) == 4400.0, "1000/2");
  c.expect(rate_kbps(4000, 2) == 1100.0, "4000/2");
  if (c.ok) c.detail = "1375, 4400, 1100 Kbps";
  return c;
}

Check noiseless_channel() {
  Check c;
  const std::vector<Encoding> encodings{Encoding::Binary(1), Encoding::Binary(4), Encoding::Binary(8),
                                        Encoding::MultiBit({0, 3, 5, 8})};
  int runs = 0;
  for (Cycles period : kDefaultPeriods) {
    for (const Encoding& enc : encodings) {
      ChannelConfig cfg;
      cfg.encoding = enc;
      cfg.sender_period = cfg.receiver_period = period;
      cfg.seed = 2024 + static_cast<std::uint64_t>(period);
      cfg.message = random_bits(enc.is_binary() ? 128 : 256, cfg.seed);
      const ChannelReport r = run_channel(cfg);
      c.expect(r.ber == 0.0, fmt::format("T={} {} {}: BER {:.4f}", period, enc.name(), enc.level_label(), r.ber));
      ++runs;
    }
  }
  if (c.ok) c.detail = fmt::format("BER 0 in {} runs", runs);
  return c;
}

Check noise_immunity() {
  Check c;
  ChannelConfig clean;
  clean.seed = 2024;
  clean.message = random_bits(1024, 1);
  clean.noise = {1.0, 0.0};
  const ChannelReport rc = run_channel(clean);
  c.expect(rc.ber == 0.0, fmt::format("clean noise BER {:.4f}", rc.ber));

  ChannelConfig dirty;
  dirty.seed = 2025;
  dirty.message = BitString(4000, 0);
  dirty.noise = {0.1, 1.0};
  const ChannelReport rd = run_channel(dirty, calibrate_thresholds(dirty, 32, 1).thresholds);
  std::size_t zeros = 0;
  std::size_t flips = 0;
  for (std::size_t i = 0; i < rd.sent_symbols.size(); ++i) {
    if (rd.sent_symbols[i] != 0) continue;
    ++zeros;
    if (rd.decoded_symbols[i] != 0) ++flips;
  }
  const double rate = static_cast<double>(flips) / static_cast<double>(zeros);
  c.expect(zeros >= 2000, fmt::format("only {} zero symbols", zeros));
  c.expect(std::abs(rate - 0.1) <= 0.03, fmt::format("dirty-noise flip rate {:.4f}", rate));
  if (c.ok) c.detail = fmt::format("clean BER 0, dirty flip rate {:.4f} over {} zeros", rate, zeros);
  return c;
}

Check defenses() {
  Check c;
  ChannelConfig cfg;
  cfg.seed = 2024;
  cfg.message = random_bits(1000, 9);
  cfg.defense = Defense::kWriteThrough;
  const ChannelReport wt = run_channel(cfg);
  c.expect(std::all_of(wt.decoded_symbols.begin(), wt.decoded_symbols.end(), [](unsigned s) { return s == 0; }),
           "write-through decoded a non-zero symbol");
  cfg.defense = Defense::kPartition;
  const ChannelReport part = run_channel(cfg);
  const unsigned first = part.decoded_symbols.front();
  c.expect(std::all_of(part.decoded_symbols.begin(), part.decoded_symbols.end(),
                       [first](unsigned s) { return s == first; }),
           "partition decoded stream varies");
  if (c.ok) c.detail = fmt::format("write-through constant 0, partition constant {}", first);
  return c;
}

Check edit_distance_metric() {
  Check c;
  c.expect(edit_distance("kitten", "sitting") == 3, "kitten/sitting");
  Rng rng(2024);
  auto random_string = [&rng] {
    std::string s(rng.uniform(21), 'a');
    for (char& ch : s) ch = static_cast<char>('a' + rng.uniform(4));
    return s;
  };
  for (int i = 0; i < 1000; ++i) {
    const std::string a = random_string();
    const std::string b = random_string();
    const std::string x = random_string();
    const std::size_t ab = edit_distance(a, b);
    c.expect(ab == oracle::memo_edit_distance(a, b), "disagrees with recursive oracle: " + a + " / " + b);
    c.expect(edit_distance(a, a) == 0, "identity");
    c.expect(ab == edit_distance(b, a), "symmetry");
    c.expect(edit_distance(a, x) <= ab + edit_distance(b, x), "triangle inequality");
    if (!c.ok) break;
  }
  if (c.ok) c.detail = "kitten/sitting = 3, 1000 pairs";
  return c;
}

Check gadgets() {
  Check c;
  int valid = 0;
  for (auto variant : {GadgetVariant::kListingA, GadgetVariant::kListingB}) {
    for (auto scenario :
         {GadgetScenario::kSetStateDirty, GadgetScenario::kPrimeWithDirty, GadgetScenario::kVictimTiming}) {
      for (auto placement : {LinePlacement::kSameLine, LinePlacement::kSameSetDistinct, LinePlacement::kDistinctSets}) {
        GadgetConfig cfg;
        cfg.variant = variant;
        cfg.scenario = scenario;
        cfg.placement = placement;
        cfg.seed = 2024;
        try {
          cfg.validate();
        } catch (const std::invalid_argument&) {
          continue;
        }
        ++valid;
        for (unsigned secret : {0u, 1u}) {
          c.expect(run_gadget_attack(cfg, secret).inferred == secret,
                   fmt::format("{}/{}/{} secret {}", to_string(variant), to_string(scenario), to_string(placement),
                               secret));
        }
      }
    }
  }
  GadgetConfig same_set;
  same_set.variant = GadgetVariant::kListingB;
  same_set.scenario = GadgetScenario::kPrimeWithDirty;
  same_set.placement = LinePlacement::kSameSetDistinct;
  bool rejected = false;
  try {
    run_gadget_attack(same_set, 1);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  c.expect(rejected, "scenario 2 same-set accepted");
  if (c.ok) c.detail = fmt::format("{} valid combinations recovered, same-set scenario 2 rejected", valid);
  return c;
}

Check determinism() {
  namespace fs = std::filesystem;
  Check c;
  const fs::path dir = fs::temp_directory_path() / fmt::format("dirtysim_acceptance_{}", ::getpid());
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::vector<std::vector<std::string>> commands{
      {"evict-prob", "--trials", "2000", "--policy", "random"},
      {"dirty-evict", "--trials", "2000"},
      {"latency-cdf", "--trials", "50", "--policy", "random", "--jitter", "2"},
      {"run-channel", "--noise-rate", "0.3", "--noise-write-fraction", "0.5", "--slip", "300"},
      {"sweep", "--trials", "2", "--message-bits", "64", "--slip", "300"},
      {"gadget", "--secret", "1", "--scenario", "victim-timing", "--policy", "random"},
  };
  for (const auto& base : commands) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / fmt::format("out{}", rep);
      const fs::path trace = dir / fmt::format("trace{}", rep);
      std::vector<std::string> args = base;
      args.insert(args.end(), {"--seed", "2024", "--out", out.string()});
      if (base[0] == "run-channel") args.insert(args.end(), {"--trace", trace.string()});
      std::ostringstream sink;
      const int code = cli::run_cli(args, sink, sink);
      c.expect(code == cli::kExitOk, base[0] + " exited " + std::to_string(code));
      outputs[rep] = slurp(out) + (base[0] == "run-channel" ? slurp(trace) : "");
    }
    c.expect(!outputs[0].empty() && outputs[0] == outputs[1], base[0] + " output differs between runs");
  }
  fs::remove_all(dir);
  if (c.ok) c.detail = fmt::format("{} commands byte-identical", commands.size());
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Check (*run)();
  };
  const Criterion criteria[] = {
      {"dirty-eviction formula", formula},
      {"true LRU eviction distance", lru_distance},
      {"tree-PLRU eviction distance", plru_distance},
      {"random replacement dirty-eviction grid", dirty_grid},
      {"replacement latency arithmetic", latency_arithmetic},
      {"rate formula", rates},
      {"noiseless channel", noiseless_channel},
      {"noise immunity", noise_immunity},
      {"defenses", defenses},
      {"edit distance", edit_distance_metric},
      {"gadgets", gadgets},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const Criterion& cr : criteria) {
    ++index;
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    if (!c.ok) ++failed;
    std::cout << fmt::format("[{}] {:2}. {}: {}\n", c.ok ? "PASS" : "FAIL", index, cr.name, c.detail);
  }
  std::cout << fmt::format("{} of {} criteria passed\n", index - failed, index);
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
