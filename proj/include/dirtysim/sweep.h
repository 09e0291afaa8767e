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

#ifndef DIRTYSIM_SWEEP_H_
#define DIRTYSIM_SWEEP_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dirtysim/channel.h"

namespace dirtysim {

// T_s = T_r values evaluated for the bit error rate curves.
inline constexpr Cycles kDefaultPeriods[] = {800, 1000, 1600, 2200, 5500, 11000};

struct SweepRow {
  Cycles period_cycles = 0;
  double rate_kbps = 0.0;
  std::string encoding;
  std::string d;
  std::uint64_t trials = 0;
  double mean_ber = 0.0;
};

// For every period, runs `trials` channels that differ only in message and
// seed; trial t uses the same message and seed at every period. The template's
// message length is kept, its content replaced. Rows follow `periods` order.
std::vector<SweepRow> sweep_ber_vs_rate(const ChannelConfig& tmpl, std::span<const Cycles> periods,
                                        std::uint64_t trials, const Thresholds& thresholds, std::uint64_t seed);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace dirtysim

#endif  // DIRTYSIM_SWEEP_H_
