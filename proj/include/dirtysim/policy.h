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

#ifndef DIRTYSIM_POLICY_H_
#define DIRTYSIM_POLICY_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dirtysim/rng.h"

namespace dirtysim {

enum class PolicyKind { kTrueLru, kTreePlru, kRandom };

std::string_view to_string(PolicyKind kind);
// Accepts "lru", "tree-plru", "random". Throws std::invalid_argument.
PolicyKind parse_policy(std::string_view name);

// Victim selection state for every set of a cache. Ways handed to
// select_victim are always valid; invalid-way fill is the cache's job.
class ReplacementPolicy {
 public:
  virtual ~ReplacementPolicy() = default;

  virtual PolicyKind kind() const = 0;
  virtual std::unique_ptr<ReplacementPolicy> clone() const = 0;

  // candidates is non-empty and sorted ascending.
  virtual unsigned select_victim(unsigned set, std::span<const unsigned> candidates) = 0;
  virtual void on_access(unsigned set, unsigned way) = 0;
  virtual void reset() = 0;
  // Uniformly random metadata for one set.
  virtual void randomize(unsigned set, Rng& rng) = 0;
  // Per-line payload for snapshots; nullopt when the policy keeps none.
  virtual std::optional<std::uint64_t> line_meta(unsigned set, unsigned way) const = 0;
};

// True LRU: each way carries the value of a monotonically increasing access
// counter at its last touch. The victim is the minimum stamp.
class TrueLruPolicy final : public ReplacementPolicy {
 public:
  TrueLruPolicy(unsigned num_sets, unsigned ways);

  PolicyKind kind() const override { return PolicyKind::kTrueLru; }
  std::unique_ptr<ReplacementPolicy> clone() const override;
  unsigned select_victim(unsigned set, std::span<const unsigned> candidates) override;
  void on_access(unsigned set, unsigned way) override;
  void reset() override;
  void randomize(unsigned set, Rng& rng) override;
  std::optional<std::uint64_t> line_meta(unsigned set, unsigned way) const override;

 private:
  unsigned ways_;
  std::uint64_t clock_ = 0;
  std::vector<std::uint64_t> stamps_;
};

// Tree-PLRU with W-1 bits per set stored in heap order (node n has children
// 2n+1 and 2n+2). Bit 0 points to the left child, bit 1 to the right. The
// victim is found by following the pointers from the root; a touch sets
// every bit on the root-to-way path to point away from that way.
class TreePlruPolicy final : public ReplacementPolicy {
 public:
  TreePlruPolicy(unsigned num_sets, unsigned ways);

  PolicyKind kind() const override { return PolicyKind::kTreePlru; }
  std::unique_ptr<ReplacementPolicy> clone() const override;
  unsigned select_victim(unsigned set, std::span<const unsigned> candidates) override;
  void on_access(unsigned set, unsigned way) override;
  void reset() override;
  void randomize(unsigned set, Rng& rng) override;
  std::optional<std::uint64_t> line_meta(unsigned, unsigned) const override { return std::nullopt; }

  unsigned tree_bit_count() const { return ways_ - 1; }
  // Bit i of the result is tree node i.
  std::uint64_t tree_bits(unsigned set) const { return bits_[set]; }
  void set_tree_bits(unsigned set, std::uint64_t bits);

 private:
  unsigned ways_;
  unsigned levels_;
  std::vector<std::uint64_t> bits_;
};

// Uniform choice among the candidates; keeps no per-set state.
class RandomPolicy final : public ReplacementPolicy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  PolicyKind kind() const override { return PolicyKind::kRandom; }
  std::unique_ptr<ReplacementPolicy> clone() const override;
  unsigned select_victim(unsigned set, std::span<const unsigned> candidates) override;
  void on_access(unsigned, unsigned) override {}
  void reset() override { rng_ = Rng(seed_); }
  void randomize(unsigned, Rng&) override {}
  std::optional<std::uint64_t> line_meta(unsigned, unsigned) const override { return std::nullopt; }

 private:
  std::uint64_t seed_;
  Rng rng_;
};

std::unique_ptr<ReplacementPolicy> make_policy(PolicyKind kind, unsigned num_sets, unsigned ways,
                                               std::uint64_t seed);

}  // namespace dirtysim

#endif  // DIRTYSIM_POLICY_H_
