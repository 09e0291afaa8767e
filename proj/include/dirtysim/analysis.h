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

#ifndef DIRTYSIM_ANALYSIS_H_
#define DIRTYSIM_ANALYSIS_H_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dirtysim {

// One element per bit, each 0 or 1.
using BitString = std::vector<std::uint8_t>;

// Parses "0101..." (whitespace ignored). Throws std::invalid_argument.
BitString parse_bits(std::string_view text);
std::string format_bits(std::span<const std::uint8_t> bits);
// Most significant bit first.
BitString bits_from_uint(std::uint64_t value, unsigned width);
BitString random_bits(std::size_t length, std::uint64_t seed);

// Levenshtein distance with unit insert/delete/substitute costs
// (Wagner-Fischer, two rows).
template <typename T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(std::span<const char>(a.data(), a.size()),
                       std::span<const char>(b.data(), b.size()));
}

inline std::size_t edit_distance(const BitString& a, const BitString& b) {
  return edit_distance(std::span<const std::uint8_t>(a), std::span<const std::uint8_t>(b));
}

inline constexpr std::size_t kDefaultAlignWindow = 32;

struct Alignment {
  std::size_t offset = 0;
  std::size_t distance = 0;
  // False when even the best offset is more than preamble_len / 4 edits away.
  bool locked = false;
};

// Searches offsets 0..window for the stream slice closest (edit distance) to
// the preamble; ties go to the smallest offset. Throws std::invalid_argument
// when window < preamble length or the preamble is empty.
Alignment align_by_preamble(std::span<const std::uint8_t> stream, std::span<const std::uint8_t> preamble,
                            std::size_t window = kDefaultAlignWindow);

struct ErrorReport {
  std::size_t edit_distance = 0;
  double ber = 0.0;
  std::size_t alignment_offset = 0;
  // Set when the raw ratio exceeded 1 and ber was clamped to 1.
  bool clamped = false;
};

// ber = edit_distance / sent length. Throws std::invalid_argument on an
// empty sent string.
ErrorReport bit_error_rate(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received);

inline constexpr double kDefaultFrequencyHz = 2.2e9;

// bits_per_symbol * f / period / 1000, rounded to 3 decimals.
double rate_kbps(std::int64_t period_cycles, unsigned bits_per_symbol, double frequency_hz = kDefaultFrequencyHz);

}  // namespace dirtysim

#endif  // DIRTYSIM_ANALYSIS_H_
