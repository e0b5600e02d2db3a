// Copyright 2026 The ddz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DDZ_DECOMP_H_
#define DDZ_DECOMP_H_

#include <compare>
#include <random>
#include <vector>

#include "ddz/cards.h"

namespace ddz {

// A partition of a hand into catalog groups. `groups` holds catalog indices
// in ascending order, so equal partitions compare equal.
struct Decomposition {
  std::vector<int> groups;

  friend auto operator<=>(const Decomposition&, const Decomposition&) = default;
  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

std::string ToString(const Decomposition& d);

// True iff every group is a legal non-empty group and the groups' cards sum
// to exactly `hand`.
bool IsValidDecomposition(const Decomposition& d, const CardMultiset& hand);

// Every partition of `hand` into groups, sorted, without duplicates.
std::vector<Decomposition> EnumerateDfs(const CardMultiset& hand);

// Exact covers of the hand's card instances (ordered by rank, then copy)
// where each group is mapped to the first instances of each of its ranks.
// Sorted; always a subset of EnumerateDfs(hand).
std::vector<Decomposition> EnumerateDlx(const CardMultiset& hand);

struct DecompositionSample {
  std::vector<Decomposition> decompositions;
  bool truncated = false;
};

inline constexpr int kDfsMaxHandSize = 10;
inline constexpr int kDefaultSampleLimit = 100;

// DLX above kDfsMaxHandSize cards, DFS otherwise. When more than `limit`
// decompositions exist, `limit` of them are drawn uniformly without
// replacement (kept in sorted order).
DecompositionSample SampleDecompositions(const CardMultiset& hand, int limit,
                                         std::mt19937_64& rng);

}  // namespace ddz

#endif  // DDZ_DECOMP_H_
