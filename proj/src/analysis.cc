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

#include "dirtysim/analysis.h"

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dirtysim/rng.h"

namespace dirtysim {

BitString parse_bits(std::string_view text) {
  BitString bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument(std::string("invalid bit character '") + c + "'");
    }
  }
  return bits;
}

std::string format_bits(std::span<const std::uint8_t> bits) {
  std::string s;
  s.reserve(bits.size());
  for (std::uint8_t b : bits) s.push_back(b ? '1' : '0');
  return s;
}

BitString bits_from_uint(std::uint64_t value, unsigned width) {
  BitString bits(width);
  for (unsigned i = 0; i < width; ++i) bits[i] = (value >> (width - 1 - i)) & 1u;
  return bits;
}

BitString random_bits(std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  BitString bits(length);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next() >> 63);
  return bits;
}

Alignment align_by_preamble(std::span<const std::uint8_t> stream, std::span<const std::uint8_t> preamble,
                            std::size_t window) {
  if (preamble.empty()) throw std::invalid_argument("preamble must not be empty");
  if (window < preamble.size()) throw std::invalid_argument("alignment window shorter than preamble");

  Alignment best{0, std::numeric_limits<std::size_t>::max(), false};
  for (std::size_t offset = 0; offset <= window && offset <= stream.size(); ++offset) {
    const auto slice = stream.subspan(offset, std::min(preamble.size(), stream.size() - offset));
    const std::size_t d = edit_distance(preamble, slice);
    if (d < best.distance) best = {offset, d, false};
  }
  best.locked = best.distance * 4 <= preamble.size();
  return best;
}

ErrorReport bit_error_rate(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received) {
  if (sent.empty()) throw std::invalid_argument("sent bit string must not be empty");
  ErrorReport r;
  r.edit_distance = edit_distance(sent, received);
  const double raw = static_cast<double>(r.edit_distance) / static_cast<double>(sent.size());
  r.clamped = raw > 1.0;
  r.ber = r.clamped ? 1.0 : raw;
  return r;
}

double rate_kbps(std::int64_t period_cycles, unsigned bits_per_symbol, double frequency_hz) {
  if (period_cycles <= 0) throw std::invalid_argument("period must be positive");
  const double kbps = static_cast<double>(bits_per_symbol) * frequency_hz /
                      static_cast<double>(period_cycles) / 1000.0;
  return std::round(kbps * 1000.0) / 1000.0;
}

}  // namespace dirtysim
