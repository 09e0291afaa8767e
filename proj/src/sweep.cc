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

#include "dirtysim/sweep.h"

#include <stdexcept>

#include <fmt/format.h>

#include "dirtysim/rng.h"

namespace dirtysim {

std::vector<SweepRow> sweep_ber_vs_rate(const ChannelConfig& tmpl, std::span<const Cycles> periods,
                                        std::uint64_t trials, const Thresholds& thresholds, std::uint64_t seed) {
  if (periods.empty()) throw std::invalid_argument("sweep needs at least one period");
  if (trials == 0) throw std::invalid_argument("sweep needs at least one trial");

  std::vector<SweepRow> rows;
  for (Cycles period : periods) {
    double sum = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      ChannelConfig cfg = tmpl;
      cfg.sender_period = cfg.receiver_period = period;
      cfg.phase_offset.reset();
      Rng rng = Rng::Derive(seed, {t});
      cfg.message = random_bits(tmpl.message.size(), rng.next());
      cfg.seed = rng.next();
      sum += run_channel(cfg, thresholds).ber;
    }
    rows.push_back({period, rate_kbps(period, tmpl.encoding.bits_per_symbol(), tmpl.frequency_hz),
                    std::string(tmpl.encoding.name()), tmpl.encoding.level_label(), trials,
                    sum / static_cast<double>(trials)});
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "period_cycles,rate_kbps,encoding,d,trials,mean_ber\n";
  for (const SweepRow& r : rows) {
    out << fmt::format("{},{:.3f},{},{},{},{:.4f}\n", r.period_cycles, r.rate_kbps, r.encoding, r.d, r.trials,
                       r.mean_ber);
  }
}

}  // namespace dirtysim
