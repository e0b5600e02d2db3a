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

#ifndef DDZ_MOVEGEN_H_
#define DDZ_MOVEGEN_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ddz/cards.h"

namespace ddz {

// Either a pass or a legal card group.
class Move {
 public:
  static Move Pass() { return Move(); }
  explicit Move(CardGroup group) : group_(std::move(group)) {}

  bool IsPass() const { return !group_.has_value(); }
  // Precondition: !IsPass().
  const CardGroup& group() const { return *group_; }
  CardMultiset cards() const { return group_ ? group_->cards : CardMultiset(); }

  friend bool operator==(const Move&, const Move&) = default;

 private:
  Move() = default;
  std::optional<CardGroup> group_;
};

// "Pass" or the comma-separated cards.
std::string ToString(const Move& move);

// Every distinct move of the game with a dense, stable index. Index 0 is
// Pass; groups follow in category-major, run-length, principal-rank, then
// kicker-rank order. Kickers are enumerated as rank combinations.
class ActionCatalog {
 public:
  static constexpr int kPassIndex = 0;

  int size() const { return static_cast<int>(moves_.size()); }
  const Move& at(int index) const { return moves_[index]; }
  std::uint64_t packed(int index) const { return packed_[index]; }

  // Index of the group whose cards equal `cards`; the empty multiset maps to
  // Pass.
  std::optional<int> IndexOf(const CardMultiset& cards) const;
  int IndexOf(const Move& move) const;

  // Group indices whose lowest card is `r`, in catalog order.
  std::span<const int> GroupsWithLowestRank(Rank r) const {
    return by_lowest_rank_[RankIndex(r)];
  }
  // Number of catalog groups per category (Pass is not counted).
  std::array<int, kNumCategories> CategoryCounts() const;

 private:
  friend ActionCatalog EnumerateAllMoves();
  void Append(Move move);

  std::vector<Move> moves_;
  std::vector<std::uint64_t> packed_;
  std::unordered_map<std::uint64_t, int> index_;
  std::array<std::vector<int>, kNumRanks> by_lowest_rank_;
};

// Builds a fresh catalog (deterministic).
ActionCatalog EnumerateAllMoves();
// Process-wide shared catalog, built on first use.
const ActionCatalog& Catalog();

// Leading (no incumbent): every group contained in `hand`, Pass excluded.
// Responding: every contained group that beats the incumbent, then Pass.
// Results are in catalog order with Pass last.
std::vector<int> LegalMoveIndices(const CardMultiset& hand,
                                  const std::optional<CardGroup>& incumbent);
std::vector<Move> LegalMoves(const CardMultiset& hand,
                             const std::optional<CardGroup>& incumbent);

// All catalog groups contained in `hand` (no Pass).
std::vector<int> ContainedGroups(const CardMultiset& hand);

}  // namespace ddz

#endif  // DDZ_MOVEGEN_H_
