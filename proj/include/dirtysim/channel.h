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

#ifndef DIRTYSIM_CHANNEL_H_
#define DIRTYSIM_CHANNEL_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dirtysim/analysis.h"
#include "dirtysim/cache.h"
#include "dirtysim/measurement.h"

namespace dirtysim {

enum class Defense { kNone, kWriteThrough, kPartition };

std::string_view to_string(Defense defense);
// Accepts "none", "write-through", "partition".
Defense parse_defense(std::string_view name);

// Maps symbols to dirty-line counts. Symbol value v (bits read MSB first)
// is encoded by installing levels()[v] dirty lines.
class Encoding {
 public:
  // 0 -> no dirty line, 1 -> d_one dirty lines.
  static Encoding Binary(unsigned d_one);
  // levels.size() must be a power of two >= 2.
  static Encoding MultiBit(std::vector<unsigned> levels);

  bool is_binary() const { return binary_; }
  unsigned bits_per_symbol() const { return bits_per_symbol_; }
  const std::vector<unsigned>& levels() const { return levels_; }
  unsigned level(unsigned symbol) const;
  unsigned symbol_of(std::span<const std::uint8_t> bits) const;
  BitString bits_of(unsigned symbol) const;

  // "binary" or "multibit"
  std::string_view name() const { return binary_ ? "binary" : "multibit"; }
  // "1" for Binary(1), "0-3-5-8" for MultiBit({0,3,5,8}).
  std::string level_label() const;

  // Levels strictly increasing, within [0, ways], and Binary's one-level > 0.
  void validate(unsigned ways) const;

 private:
  Encoding(bool binary, std::vector<unsigned> levels);

  bool binary_;
  unsigned bits_per_symbol_;
  std::vector<unsigned> levels_;
};

struct NoiseConfig {
  // Probability of one noise access per sender period (values >= 1 mean
  // every period).
  double rate = 0.0;
  // Probability that a noise access is a write (dirty) rather than a read.
  double write_fraction = 0.0;
};

// 0xF0F0
BitString default_preamble();

struct ChannelConfig {
  CacheGeometry geometry;
  PolicyKind policy = PolicyKind::kTrueLru;
  LatencyModel latency;
  Defense defense = Defense::kNone;
  unsigned target_set = 0;
  Encoding encoding = Encoding::Binary(1);
  Cycles sender_period = 5500;
  Cycles receiver_period = 5500;
  // Receiver wake-up relative to the sender's; defaults to half a period.
  std::optional<Cycles> phase_offset;
  unsigned replacement_size = kDefaultReplacementSize;
  BitString preamble = default_preamble();
  BitString message;
  NoiseConfig noise;
  // Each actor wakes up late by a uniform [0, slip] cycles every period.
  Cycles slip = 0;
  Cycles timer_overhead = 0;
  double frequency_hz = kDefaultFrequencyHz;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument.
  void validate() const;
  Cycles effective_phase_offset() const;
  // Geometry with the defense applied. Partitioning splits the ways evenly
  // between receiver, sender and (when enabled) the noise actor.
  CacheGeometry effective_geometry() const;
  // Same channel without defense, noise or slip: what a receiver expects
  // when it calibrates.
  ChannelConfig nominal() const;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cut points between adjacent levels, ascending. A total above the i-th cut
// (strictly) decodes to a symbol > i.
struct Thresholds {
  std::vector<double> cuts;

  unsigned classify(Cycles total_cycles) const;
};

struct Calibration {
  Thresholds thresholds;
  std::vector<double> means;
  std::vector<double> stddevs;
  // False when two adjacent levels are closer than twice their larger
  // standard deviation (including equal means).
  bool separated = true;
  std::string problem;
};

// Runs init, encode and decode `trials` times per level on the nominal
// channel. Cuts are midpoints of adjacent level means.
Calibration calibrate_thresholds(const ChannelConfig& cfg, std::uint64_t trials, std::uint64_t seed);

// Address-space layout shared by the actors. Sender lines use tags [0, W);
// receiver initialization lines [0, W); replacement set A starts at tag W and
// B at W + L.
LineRef sender_line(const ChannelConfig& cfg, unsigned index);
ReplacementSet receiver_replacement_set(const ChannelConfig& cfg, unsigned parity);

// Dirties level(symbol) sender lines in the target set; returns the cycles
// spent. A zero level performs no access.
Cycles sender_encode(Cache& cache, const ChannelConfig& cfg, std::span<const std::uint8_t> symbol_bits);
Cycles sender_encode_symbol(Cache& cache, const ChannelConfig& cfg, unsigned symbol);

// Reads W receiver lines into the target set.
void receiver_init(Cache& cache, const ChannelConfig& cfg);

struct Decoded {
  LatencySample sample;
  unsigned symbol = 0;
  BitString bits;
};

// Times replacement set A (parity 1) or B (parity 0) and thresholds the sum.
Decoded receiver_decode(Cache& cache, const ChannelConfig& cfg, unsigned parity, const Thresholds& thresholds);

enum class TraceAction { kEncode, kNoiseRead, kNoiseWrite, kDecode };
std::string_view to_string(TraceAction action);

struct TraceEvent {
  Cycles cycle = 0;
  ActorId actor = 0;
  TraceAction action = TraceAction::kEncode;
  unsigned set = 0;
  unsigned d = 0;
  Cycles latency = 0;
  std::optional<unsigned> decoded;
  std::optional<unsigned> truth;
};

struct DecodeRecord {
  Cycles cycle = 0;
  Cycles total_cycles = 0;
  unsigned symbol = 0;
};

struct ChannelReport {
  BitString sent_bits;
  BitString received_bits;
  Alignment alignment;
  std::size_t edit_distance = 0;
  double ber = 0.0;
  bool ber_clamped = false;
  double rate_kbps = 0.0;
  std::vector<unsigned> sent_symbols;
  std::vector<unsigned> decoded_symbols;
  std::vector<DecodeRecord> latency_trace;
  std::vector<TraceEvent> trace;
  EventCounters counters;
  // Replacement accesses that unexpectedly hit in L1.
  std::uint64_t resident_hits = 0;
};

// Discrete-event run of the timed protocol: the sender encodes symbol i at
// i * T_s, the receiver decodes at i * T_r + phase offset. Events at the same
// cycle run sender, then noise, then receiver. Every access is one event, so
// slipping actors interleave at access granularity.
ChannelReport run_channel(const ChannelConfig& cfg, const Thresholds& thresholds);
// Calibrates first; throws CalibrationError when levels overlap.
ChannelReport run_channel(const ChannelConfig& cfg);

void write_trace_csv(std::ostream& out, std::span<const TraceEvent> trace);

}  // namespace dirtysim

#endif  // DIRTYSIM_CHANNEL_H_
