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

#include "dirtysim/policy.h"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace dirtysim {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kTrueLru:
      return "lru";
    case PolicyKind::kTreePlru:
      return "tree-plru";
    case PolicyKind::kRandom:
      return "random";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "lru") return PolicyKind::kTrueLru;
  if (name == "tree-plru") return PolicyKind::kTreePlru;
  if (name == "random") return PolicyKind::kRandom;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

// --- TrueLruPolicy ---

TrueLruPolicy::TrueLruPolicy(unsigned num_sets, unsigned ways)
    : ways_(ways), stamps_(static_cast<std::size_t>(num_sets) * ways, 0) {}

std::unique_ptr<ReplacementPolicy> TrueLruPolicy::clone() const {
  return std::make_unique<TrueLruPolicy>(*this);
}

unsigned TrueLruPolicy::select_victim(unsigned set, std::span<const unsigned> candidates) {
  const std::uint64_t* row = &stamps_[static_cast<std::size_t>(set) * ways_];
  return *std::min_element(candidates.begin(), candidates.end(),
                           [row](unsigned a, unsigned b) { return row[a] < row[b]; });
}

void TrueLruPolicy::on_access(unsigned set, unsigned way) {
  stamps_[static_cast<std::size_t>(set) * ways_ + way] = ++clock_;
}

void TrueLruPolicy::reset() {
  std::fill(stamps_.begin(), stamps_.end(), 0);
  clock_ = 0;
}

void TrueLruPolicy::randomize(unsigned set, Rng& rng) {
  std::vector<unsigned> order(ways_);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);
  for (unsigned way : order) on_access(set, way);
}

std::optional<std::uint64_t> TrueLruPolicy::line_meta(unsigned set, unsigned way) const {
  return stamps_[static_cast<std::size_t>(set) * ways_ + way];
}

// --- TreePlruPolicy ---

TreePlruPolicy::TreePlruPolicy(unsigned num_sets, unsigned ways)
    : ways_(ways), levels_(static_cast<unsigned>(std::countr_zero(ways))), bits_(num_sets, 0) {
  if (!std::has_single_bit(ways) || ways > 64) {
    throw std::invalid_argument("tree-plru needs a power-of-two associativity <= 64");
  }
}

std::unique_ptr<ReplacementPolicy> TreePlruPolicy::clone() const {
  return std::make_unique<TreePlruPolicy>(*this);
}

unsigned TreePlruPolicy::select_victim(unsigned set, std::span<const unsigned> candidates) {
  const std::uint64_t bits = bits_[set];
  // Follow the pointers, but never descend into a subtree without candidates
  // (only possible under way partitioning).
  auto has_candidate = [&](unsigned lo, unsigned hi) {
    auto it = std::lower_bound(candidates.begin(), candidates.end(), lo);
    return it != candidates.end() && *it < hi;
  };
  unsigned node = 0;
  unsigned lo = 0;
  unsigned span = ways_;
  for (unsigned level = 0; level < levels_; ++level) {
    span /= 2;
    bool right = (bits >> node) & 1u;
    const unsigned chosen_lo = right ? lo + span : lo;
    if (!has_candidate(chosen_lo, chosen_lo + span)) right = !right;
    if (right) lo += span;
    node = 2 * node + (right ? 2 : 1);
  }
  return lo;
}

void TreePlruPolicy::on_access(unsigned set, unsigned way) {
  std::uint64_t& bits = bits_[set];
  unsigned node = way + ways_ - 1;
  while (node > 0) {
    const unsigned parent = (node - 1) / 2;
    const bool came_from_right = node == 2 * parent + 2;
    if (came_from_right) {
      bits &= ~(std::uint64_t{1} << parent);
    } else {
      bits |= std::uint64_t{1} << parent;
    }
    node = parent;
  }
}

void TreePlruPolicy::reset() { std::fill(bits_.begin(), bits_.end(), 0); }

void TreePlruPolicy::randomize(unsigned set, Rng& rng) {
  set_tree_bits(set, rng.uniform(std::uint64_t{1} << tree_bit_count()));
}

void TreePlruPolicy::set_tree_bits(unsigned set, std::uint64_t bits) {
  const unsigned n = tree_bit_count();
  const std::uint64_t mask = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  bits_[set] = bits & mask;
}

// --- RandomPolicy ---

std::unique_ptr<ReplacementPolicy> RandomPolicy::clone() const {
  return std::make_unique<RandomPolicy>(*this);
}

unsigned RandomPolicy::select_victim(unsigned, std::span<const unsigned> candidates) {
  return candidates[rng_.uniform(candidates.size())];
}

std::unique_ptr<ReplacementPolicy> make_policy(PolicyKind kind, unsigned num_sets, unsigned ways,
                                               std::uint64_t seed) {
  switch (kind) {
    case PolicyKind::kTrueLru:
      return std::make_unique<TrueLruPolicy>(num_sets, ways);
    case PolicyKind::kTreePlru:
      return std::make_unique<TreePlruPolicy>(num_sets, ways);
    case PolicyKind::kRandom:
      return std::make_unique<RandomPolicy>(seed);
  }
  throw std::invalid_argument("unknown policy kind");
}

}  // namespace dirtysim
