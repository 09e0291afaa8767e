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

#ifndef DIRTYSIM_RNG_H_
#define DIRTYSIM_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace dirtysim {

// Seeded generator with portable bounded draws. std::mt19937_64 output is
// fixed by the standard, but the std:: distributions are not, so draws go
// through uniform() to keep runs byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream keyed by a seed and any number of labels.
  static Rng Derive(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * labels.size());
    auto push = [&words](std::uint64_t v) {
      words.push_back(static_cast<std::uint32_t>(v));
      words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (std::uint64_t label : labels) push(label);
    std::seed_seq seq(words.begin(), words.end());
    Rng rng(0);
    rng.engine_.seed(seq);
    return rng;
  }

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform double in [0, 1) with 53 bits of resolution.
  double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform_real() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dirtysim

#endif  // DIRTYSIM_RNG_H_
