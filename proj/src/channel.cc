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

#include "dirtysim/channel.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <tuple>
#include <utility>

#include "dirtysim/rng.h"

namespace dirtysim {

namespace {

constexpr int kSenderPriority = 0;
constexpr int kNoisePriority = 1;
constexpr int kReceiverPriority = 2;

// Stream labels for Rng::Derive.
constexpr std::uint64_t kCacheStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kSlipStream = 3;
constexpr std::uint64_t kChaseStream = 4;
constexpr std::uint64_t kCalibrationStream = 5;

// Total order on (cycle, priority, insertion sequence).
class EventQueue {
 public:
  void push(Cycles at, int priority, std::function<void(Cycles)> fire) {
    events_.push(Event{at, priority, seq_++, std::move(fire)});
  }

  void run() {
    while (!events_.empty()) {
      Event e = events_.top();
      events_.pop();
      e.fire(e.at);
    }
  }

 private:
  struct Event {
    Cycles at;
    int priority;
    std::uint64_t seq;
    std::function<void(Cycles)> fire;

    bool operator>(const Event& o) const {
      return std::tie(at, priority, seq) > std::tie(o.at, o.priority, o.seq);
    }
  };

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
};

std::vector<unsigned> symbols_of(const Encoding& enc, const BitString& bits) {
  const unsigned k = enc.bits_per_symbol();
  std::vector<unsigned> out;
  out.reserve(bits.size() / k);
  for (std::size_t i = 0; i + k <= bits.size(); i += k) {
    out.push_back(enc.symbol_of(std::span<const std::uint8_t>(bits).subspan(i, k)));
  }
  return out;
}

class ChannelRun {
 public:
  ChannelRun(const ChannelConfig& cfg, const Thresholds& thresholds)
      : cfg_(cfg),
        thresholds_(thresholds),
        cache_(cfg.effective_geometry(), cfg.policy, cfg.latency, Rng::Derive(cfg.seed, {kCacheStream}).next()),
        rsets_{receiver_replacement_set(cfg, 0), receiver_replacement_set(cfg, 1)} {
    BitString stream = cfg.preamble;
    stream.insert(stream.end(), cfg.message.begin(), cfg.message.end());
    symbols_ = symbols_of(cfg.encoding, stream);
    const std::size_t n = symbols_.size();

    Rng slip = Rng::Derive(cfg.seed, {kSlipStream});
    sender_slip_.resize(n);
    receiver_slip_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      sender_slip_[i] = cfg.slip > 0 ? slip.uniform_int(0, cfg.slip) : 0;
      receiver_slip_[i] = cfg.slip > 0 ? slip.uniform_int(0, cfg.slip) : 0;
    }
  }

  ChannelReport run() {
    receiver_init(cache_, cfg_);
    schedule_noise();
    if (!symbols_.empty()) {
      schedule_sender(0, 0);
      schedule_receiver(0, 0);
    }
    queue_.run();
    return assemble();
  }

 private:
  void schedule_noise() {
    const double p = std::min(cfg_.noise.rate, 1.0);
    if (p <= 0.0) return;
    Rng rng = Rng::Derive(cfg_.seed, {kNoiseStream});
    const Cycles window = std::max<Cycles>(cfg_.effective_phase_offset(), 1);
    const CacheGeometry& g = cache_.geometry();
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (!rng.bernoulli(p)) continue;
      const Cycles at = static_cast<Cycles>(i) * cfg_.sender_period + rng.uniform_int(0, window - 1);
      const bool write = rng.bernoulli(cfg_.noise.write_fraction);
      const LineRef line{kNoise, g.line_address(cfg_.target_set, noise_tag_++)};
      queue_.push(at, kNoisePriority, [this, line, write](Cycles now) {
        const AccessOutcome o = cache_.access(line, write ? AccessKind::kWrite : AccessKind::kRead);
        trace_.push_back({now, kNoise, write ? TraceAction::kNoiseWrite : TraceAction::kNoiseRead,
                          cfg_.target_set, write ? 1u : 0u, o.latency, std::nullopt, std::nullopt});
      });
    }
  }

  void schedule_sender(std::size_t period, Cycles free_at) {
    const Cycles at = std::max(static_cast<Cycles>(period) * cfg_.sender_period + sender_slip_[period], free_at);
    queue_.push(at, kSenderPriority, [this, period](Cycles now) { sender_access(period, 0, now, now, 0); });
  }

  void sender_access(std::size_t period, unsigned index, Cycles start, Cycles now, Cycles spent) {
    const unsigned symbol = symbols_[period];
    const unsigned d = cfg_.encoding.level(symbol);
    if (index < d) {
      const Cycles latency = cache_.access(sender_line(cfg_, index), AccessKind::kWrite).latency;
      queue_.push(now + latency, kSenderPriority, [this, period, index, start, spent, latency](Cycles t) {
        sender_access(period, index + 1, start, t, spent + latency);
      });
      return;
    }
    trace_.push_back({start, kSender, TraceAction::kEncode, cfg_.target_set, d, spent, std::nullopt, symbol});
    if (period + 1 < symbols_.size()) schedule_sender(period + 1, now);
  }

  void schedule_receiver(std::size_t period, Cycles free_at) {
    const Cycles at = std::max(static_cast<Cycles>(period) * cfg_.receiver_period +
                                   cfg_.effective_phase_offset() + receiver_slip_[period],
                               free_at);
    queue_.push(at, kReceiverPriority, [this, period](Cycles now) { receiver_access(period, 0, now, now, 0, 0); });
  }

  // Alternates between the two replacement sets: B on even periods, A on odd.
  void receiver_access(std::size_t period, unsigned index, Cycles start, Cycles now, Cycles total, unsigned hits) {
    const ReplacementSet& rset = rsets_[period % 2];
    if (index < rset.chase_order.size()) {
      const AccessOutcome o = cache_.access(rset.lines[rset.chase_order[index]], AccessKind::kRead);
      const unsigned h = hits + (o.kind == OutcomeKind::kHit ? 1u : 0u);
      queue_.push(now + o.latency, kReceiverPriority, [this, period, index, start, total, h, o](Cycles t) {
        receiver_access(period, index + 1, start, t, total + o.latency, h);
      });
      return;
    }
    const Cycles measured = total + cfg_.timer_overhead;
    const unsigned symbol = thresholds_.classify(measured);
    resident_hits_ += hits;
    decoded_.push_back(symbol);
    latency_trace_.push_back({start, measured, symbol});
    trace_.push_back({start, kReceiver, TraceAction::kDecode, cfg_.target_set, cfg_.encoding.level(symbol),
                      measured, symbol, symbols_[period]});
    if (period + 1 < symbols_.size()) schedule_receiver(period + 1, now);
  }

  ChannelReport assemble() {
    ChannelReport r;
    r.sent_bits = cfg_.message;
    for (unsigned s : decoded_) {
      const BitString b = cfg_.encoding.bits_of(s);
      r.received_bits.insert(r.received_bits.end(), b.begin(), b.end());
    }
    const std::size_t window = std::max(kDefaultAlignWindow, cfg_.preamble.size());
    r.alignment = align_by_preamble(r.received_bits, cfg_.preamble, window);
    const std::size_t start = std::min(r.received_bits.size(),
                                       (r.alignment.locked ? r.alignment.offset : 0) + cfg_.preamble.size());
    const ErrorReport err = bit_error_rate(
        r.sent_bits, std::span<const std::uint8_t>(r.received_bits).subspan(start));
    r.edit_distance = err.edit_distance;
    r.ber = err.ber;
    r.ber_clamped = err.clamped;
    r.rate_kbps = rate_kbps(cfg_.sender_period, cfg_.encoding.bits_per_symbol(), cfg_.frequency_hz);
    r.sent_symbols = symbols_;
    r.decoded_symbols = decoded_;
    r.latency_trace = std::move(latency_trace_);
    std::stable_sort(trace_.begin(), trace_.end(),
                     [](const TraceEvent& a, const TraceEvent& b) { return a.cycle < b.cycle; });
    r.trace = std::move(trace_);
    r.counters = cache_.counters();
    r.resident_hits = resident_hits_;
    return r;
  }

  const ChannelConfig& cfg_;
  const Thresholds& thresholds_;
  Cache cache_;
  ReplacementSet rsets_[2];
  EventQueue queue_;
  std::vector<unsigned> symbols_;
  std::vector<Cycles> sender_slip_;
  std::vector<Cycles> receiver_slip_;
  std::vector<unsigned> decoded_;
  std::vector<DecodeRecord> latency_trace_;
  std::vector<TraceEvent> trace_;
  std::uint64_t resident_hits_ = 0;
  std::uint64_t noise_tag_ = 0;
};

}  // namespace

std::string_view to_string(Defense defense) {
  switch (defense) {
    case Defense::kNone:
      return "none";
    case Defense::kWriteThrough:
      return "write-through";
    case Defense::kPartition:
      return "partition";
  }
  return "?";
}

Defense parse_defense(std::string_view name) {
  if (name == "none") return Defense::kNone;
  if (name == "write-through") return Defense::kWriteThrough;
  if (name == "partition") return Defense::kPartition;
  throw std::invalid_argument("unknown defense '" + std::string(name) + "'");
}

// --- Encoding ---

Encoding::Encoding(bool binary, std::vector<unsigned> levels)
    : binary_(binary), bits_per_symbol_(0), levels_(std::move(levels)) {
  const std::size_t n = levels_.size();
  if (n < 2 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("number of encoding levels must be a power of two >= 2");
  }
  while ((std::size_t{1} << bits_per_symbol_) < n) ++bits_per_symbol_;
}

Encoding Encoding::Binary(unsigned d_one) { return Encoding(true, {0, d_one}); }

Encoding Encoding::MultiBit(std::vector<unsigned> levels) { return Encoding(false, std::move(levels)); }

unsigned Encoding::level(unsigned symbol) const {
  if (symbol >= levels_.size()) throw std::invalid_argument("symbol has no encoding level");
  return levels_[symbol];
}

unsigned Encoding::symbol_of(std::span<const std::uint8_t> bits) const {
  if (bits.size() != bits_per_symbol_) {
    throw std::invalid_argument("symbol needs " + std::to_string(bits_per_symbol_) + " bits");
  }
  unsigned v = 0;
  for (std::uint8_t b : bits) {
    if (b > 1) throw std::invalid_argument("bit value out of range");
    v = (v << 1) | b;
  }
  return v;
}

BitString Encoding::bits_of(unsigned symbol) const { return bits_from_uint(symbol, bits_per_symbol_); }

std::string Encoding::level_label() const {
  if (binary_) return std::to_string(levels_[1]);
  std::string s;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(levels_[i]);
  }
  return s;
}

void Encoding::validate(unsigned ways) const {
  if (binary_ && levels_[1] == 0) throw std::invalid_argument("binary one-level must be >= 1");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] > ways) throw std::invalid_argument("encoding level exceeds associativity");
    if (i > 0 && levels_[i] <= levels_[i - 1]) {
      throw std::invalid_argument("encoding levels must be strictly increasing");
    }
  }
}

BitString default_preamble() { return bits_from_uint(0xF0F0, 16); }

// --- ChannelConfig ---

void ChannelConfig::validate() const {
  geometry.validate();
  encoding.validate(geometry.associativity);
  if (target_set >= geometry.num_sets) throw std::invalid_argument("target set out of range");
  if (sender_period <= 0 || receiver_period <= 0) throw std::invalid_argument("periods must be positive");
  if (sender_period != receiver_period) {
    throw std::invalid_argument("sender and receiver periods must be equal");
  }
  if (phase_offset && (*phase_offset < 0 || *phase_offset >= receiver_period)) {
    throw std::invalid_argument("phase offset must lie in [0, period)");
  }
  if (replacement_size == 0) throw std::invalid_argument("replacement set size must be >= 1");
  if (message.empty()) throw std::invalid_argument("message must not be empty");
  const unsigned k = encoding.bits_per_symbol();
  if (preamble.size() % k != 0 || message.size() % k != 0) {
    throw std::invalid_argument("preamble and message lengths must be multiples of the symbol width");
  }
  for (auto b : preamble) {
    if (b > 1) throw std::invalid_argument("preamble holds a non-bit value");
  }
  for (auto b : message) {
    if (b > 1) throw std::invalid_argument("message holds a non-bit value");
  }
  if (noise.rate < 0.0) throw std::invalid_argument("noise rate must be >= 0");
  if (noise.write_fraction < 0.0 || noise.write_fraction > 1.0) {
    throw std::invalid_argument("noise write fraction must lie in [0, 1]");
  }
  if (slip < 0 || timer_overhead < 0) throw std::invalid_argument("slip and timer overhead must be >= 0");
  if (latency.jitter < 0) throw std::invalid_argument("jitter must be >= 0");
  if (!(frequency_hz > 0.0)) throw std::invalid_argument("frequency must be positive");
  effective_geometry().validate();
}

Cycles ChannelConfig::effective_phase_offset() const {
  return phase_offset.value_or(receiver_period / 2);
}

CacheGeometry ChannelConfig::effective_geometry() const {
  CacheGeometry g = geometry;
  switch (defense) {
    case Defense::kNone:
      break;
    case Defense::kWriteThrough:
      g.write_policy = WritePolicy::kWriteThroughNoAllocate;
      break;
    case Defense::kPartition: {
      std::vector<ActorId> actors{kReceiver, kSender};
      if (noise.rate > 0.0) actors.push_back(kNoise);
      const unsigned w = g.associativity;
      if (w < actors.size()) throw std::invalid_argument("not enough ways to partition");
      std::map<ActorId, std::vector<unsigned>> parts;
      unsigned next = 0;
      for (std::size_t i = 0; i < actors.size(); ++i) {
        const unsigned share = w / actors.size() + (i < w % actors.size() ? 1 : 0);
        for (unsigned j = 0; j < share; ++j) parts[actors[i]].push_back(next++);
      }
      g.partition = std::move(parts);
      break;
    }
  }
  return g;
}

ChannelConfig ChannelConfig::nominal() const {
  ChannelConfig c = *this;
  c.defense = Defense::kNone;
  c.noise = NoiseConfig{};
  c.slip = 0;
  return c;
}

// --- Thresholds ---

unsigned Thresholds::classify(Cycles total_cycles) const {
  const double v = static_cast<double>(total_cycles);
  return static_cast<unsigned>(std::count_if(cuts.begin(), cuts.end(), [v](double c) { return v > c; }));
}

// --- actor operations ---

LineRef sender_line(const ChannelConfig& cfg, unsigned index) {
  return {kSender, cfg.geometry.line_address(cfg.target_set, index)};
}

ReplacementSet receiver_replacement_set(const ChannelConfig& cfg, unsigned parity) {
  const std::uint64_t w = cfg.geometry.associativity;
  const std::uint64_t first_tag = parity == 1 ? w : w + cfg.replacement_size;
  return build_replacement_set(cfg.geometry, kReceiver, cfg.target_set, cfg.replacement_size,
                               Rng::Derive(cfg.seed, {kChaseStream, parity}).next(), first_tag);
}

Cycles sender_encode_symbol(Cache& cache, const ChannelConfig& cfg, unsigned symbol) {
  const unsigned d = cfg.encoding.level(symbol);
  Cycles spent = 0;
  for (unsigned j = 0; j < d; ++j) spent += cache.access(sender_line(cfg, j), AccessKind::kWrite).latency;
  return spent;
}

Cycles sender_encode(Cache& cache, const ChannelConfig& cfg, std::span<const std::uint8_t> symbol_bits) {
  return sender_encode_symbol(cache, cfg, cfg.encoding.symbol_of(symbol_bits));
}

void receiver_init(Cache& cache, const ChannelConfig& cfg) {
  for (unsigned i = 0; i < cfg.geometry.associativity; ++i) {
    cache.access({kReceiver, cfg.geometry.line_address(cfg.target_set, i)}, AccessKind::kRead);
  }
}

Decoded receiver_decode(Cache& cache, const ChannelConfig& cfg, unsigned parity, const Thresholds& thresholds) {
  Decoded out;
  out.sample = measure_replacement_latency(cache, receiver_replacement_set(cfg, parity % 2), cfg.timer_overhead);
  out.symbol = thresholds.classify(out.sample.total_cycles);
  out.bits = cfg.encoding.bits_of(out.symbol);
  return out;
}

Calibration calibrate_thresholds(const ChannelConfig& cfg, std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("calibration needs at least one trial");
  const ChannelConfig nominal = cfg.nominal();
  const auto& levels = nominal.encoding.levels();

  Calibration cal;
  for (unsigned symbol = 0; symbol < levels.size(); ++symbol) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      Cache cache(nominal.effective_geometry(), nominal.policy, nominal.latency,
                  Rng::Derive(seed, {kCalibrationStream, symbol, t}).next());
      receiver_init(cache, nominal);
      sender_encode_symbol(cache, nominal, symbol);
      const double v = static_cast<double>(
          measure_replacement_latency(cache, receiver_replacement_set(nominal, 0), nominal.timer_overhead)
              .total_cycles);
      sum += v;
      sum_sq += v * v;
    }
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    cal.means.push_back(mean);
    cal.stddevs.push_back(std::sqrt(var));
  }
  for (std::size_t i = 1; i < cal.means.size(); ++i) {
    cal.thresholds.cuts.push_back((cal.means[i - 1] + cal.means[i]) / 2.0);
    const double gap = cal.means[i] - cal.means[i - 1];
    if (gap <= 2.0 * std::max(cal.stddevs[i - 1], cal.stddevs[i]) && cal.separated) {
      cal.separated = false;
      cal.problem = "levels d=" + std::to_string(levels[i - 1]) + " and d=" + std::to_string(levels[i]) +
                    " overlap (mean gap " + std::to_string(gap) + " cycles)";
    }
  }
  return cal;
}

ChannelReport run_channel(const ChannelConfig& cfg, const Thresholds& thresholds) {
  cfg.validate();
  if (thresholds.cuts.size() + 1 != cfg.encoding.levels().size()) {
    throw std::invalid_argument("threshold count does not match the encoding");
  }
  ChannelRun run(cfg, thresholds);
  return run.run();
}

ChannelReport run_channel(const ChannelConfig& cfg) {
  cfg.validate();
  const Calibration cal = calibrate_thresholds(cfg, 32, Rng::Derive(cfg.seed, {kCalibrationStream}).next());
  if (!cal.separated) throw CalibrationError(cal.problem);
  return run_channel(cfg, cal.thresholds);
}

std::string_view to_string(TraceAction action) {
  switch (action) {
    case TraceAction::kEncode:
      return "encode";
    case TraceAction::kNoiseRead:
      return "noise_read";
    case TraceAction::kNoiseWrite:
      return "noise_write";
    case TraceAction::kDecode:
      return "decode";
  }
  return "?";
}

void write_trace_csv(std::ostream& out, std::span<const TraceEvent> trace) {
  out << "cycle,actor,action,set,d,latency,decoded_bit,truth_bit\n";
  for (const TraceEvent& e : trace) {
    out << e.cycle << ',' << e.actor << ',' << to_string(e.action) << ',' << e.set << ',' << e.d << ','
        << e.latency << ',';
    if (e.decoded) out << *e.decoded;
    out << ',';
    if (e.truth) out << *e.truth;
    out << '\n';
  }
}

}  // namespace dirtysim
