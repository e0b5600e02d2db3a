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

#include "ddz/movegen.h"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace ddz {
namespace {

constexpr int kAce = RankIndex(Rank::kAce);
constexpr int kTwo = RankIndex(Rank::kTwo);

CardGroup MakeGroup(Category category, int principal, int run_length,
                    const CardMultiset& principal_cards,
                    const CardMultiset& kickers) {
  CardGroup g;
  g.cards = principal_cards + kickers;
  g.category = category;
  g.principal = RankFromIndex(principal);
  g.run_length = run_length;
  g.kickers = kickers;
  return g;
}

CardMultiset Copies(int first, int length, int copies) {
  CardMultiset m;
  for (int i = first; i < first + length; ++i) m.Add(RankFromIndex(i), copies);
  return m;
}

// Calls `fn` with every k-combination (ascending) of `pool`.
void ForEachCombination(const std::vector<int>& pool, int k,
                        const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(pick.size()) == k) {
      fn(pick);
      return;
    }
    for (int i = start; i < static_cast<int>(pool.size()); ++i) {
      pick.push_back(pool[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

bool IsNukePair(const std::vector<int>& ranks) {
  return ranks.size() == 2 && ranks[0] == RankIndex(Rank::kBlackJoker) &&
         ranks[1] == RankIndex(Rank::kRedJoker);
}

std::vector<int> OtherRanks(int first, int length, bool include_jokers) {
  std::vector<int> out;
  const int limit = include_jokers ? kNumRanks : kTwo + 1;
  for (int i = 0; i < limit; ++i) {
    if (i < first || i >= first + length) out.push_back(i);
  }
  return out;
}

CardMultiset KickerCards(const std::vector<int>& ranks, int copies) {
  CardMultiset m;
  for (int r : ranks) m.Add(RankFromIndex(r), copies);
  return m;
}

}  // namespace

std::string ToString(const Move& move) {
  return move.IsPass() ? std::string("Pass") : FormatCards(move.cards());
}

void ActionCatalog::Append(Move move) {
  const int index = size();
  const std::uint64_t packed = move.cards().Packed();
  if (!index_.emplace(packed, index).second) {
    throw std::logic_error("duplicate catalog entry " + ToString(move));
  }
  if (!move.IsPass()) {
    by_lowest_rank_[RankIndex(*move.cards().LowestRank())].push_back(index);
  }
  packed_.push_back(packed);
  moves_.push_back(std::move(move));
}

std::optional<int> ActionCatalog::IndexOf(const CardMultiset& cards) const {
  const auto it = index_.find(cards.Packed());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ActionCatalog::IndexOf(const Move& move) const {
  const auto index = IndexOf(move.cards());
  if (!index) throw std::invalid_argument("move not in catalog: " + ToString(move));
  return *index;
}

std::array<int, kNumCategories> ActionCatalog::CategoryCounts() const {
  std::array<int, kNumCategories> counts{};
  for (const Move& m : moves_) {
    if (!m.IsPass()) ++counts[static_cast<int>(m.group().category)];
  }
  return counts;
}

ActionCatalog EnumerateAllMoves() {
  ActionCatalog catalog;
  auto add = [&](Category category, int principal, int run_length,
                 const CardMultiset& principal_cards,
                 const CardMultiset& kickers = {}) {
    catalog.Append(
        Move(MakeGroup(category, principal, run_length, principal_cards, kickers)));
  };

  catalog.Append(Move::Pass());

  for (int r = 0; r < kNumRanks; ++r) add(Category::kSolo, r, 1, Copies(r, 1, 1));
  for (int r = 0; r <= kTwo; ++r) add(Category::kPair, r, 1, Copies(r, 1, 2));
  for (int r = 0; r <= kTwo; ++r) add(Category::kTrio, r, 1, Copies(r, 1, 3));

  // Runs: the longest run of each kind still fits in a 20-card hand.
  struct RunKind {
    Category category;
    int copies;
    int min_length;
    int max_length;
  };
  for (const RunKind& kind : {RunKind{Category::kSequentialSolos, 1, 5, 12},
                              RunKind{Category::kSequentialPairs, 2, 3, 10},
                              RunKind{Category::kSequentialTriosTakeNone, 3, 2, 6}}) {
    for (int length = kind.min_length; length <= kind.max_length; ++length) {
      for (int first = 0; first + length - 1 <= kAce; ++first) {
        add(kind.category, first + length - 1, length,
            Copies(first, length, kind.copies));
      }
    }
  }

  for (int r = 0; r <= kTwo; ++r) {
    for (int k : OtherRanks(r, 1, true)) {
      add(Category::kSequentialTriosTakeOne, r, 1, Copies(r, 1, 3), Copies(k, 1, 1));
    }
  }
  for (int r = 0; r <= kTwo; ++r) {
    for (int k : OtherRanks(r, 1, false)) {
      add(Category::kSequentialTriosTakeTwo, r, 1, Copies(r, 1, 3), Copies(k, 1, 2));
    }
  }

  // Trio series with one kicker per trio; the kicker set is never exactly
  // the nuke.
  for (int length = 2; 4 * length <= kMaxHandSize; ++length) {
    for (int first = 0; first + length - 1 <= kAce; ++first) {
      ForEachCombination(OtherRanks(first, length, true), length,
                         [&](const std::vector<int>& ks) {
                           if (IsNukePair(ks)) return;
                           add(Category::kSequentialTriosSeriesTakeOne,
                               first + length - 1, length, Copies(first, length, 3),
                               KickerCards(ks, 1));
                         });
    }
  }
  for (int length = 2; 5 * length <= kMaxHandSize; ++length) {
    for (int first = 0; first + length - 1 <= kAce; ++first) {
      ForEachCombination(OtherRanks(first, length, false), length,
                         [&](const std::vector<int>& ks) {
                           add(Category::kSequentialTriosSeriesTakeTwo,
                               first + length - 1, length, Copies(first, length, 3),
                               KickerCards(ks, 2));
                         });
    }
  }

  for (int r = 0; r <= kTwo; ++r) add(Category::kBomb, r, 1, Copies(r, 1, 4));
  for (int r = 0; r <= kTwo; ++r) {
    ForEachCombination(OtherRanks(r, 1, true), 2, [&](const std::vector<int>& ks) {
      if (IsNukePair(ks)) return;
      add(Category::kFourTakeTwoSolos, r, 1, Copies(r, 1, 4), KickerCards(ks, 1));
    });
  }
  for (int r = 0; r <= kTwo; ++r) {
    ForEachCombination(OtherRanks(r, 1, false), 2, [&](const std::vector<int>& ks) {
      add(Category::kFourTakeTwoPairs, r, 1, Copies(r, 1, 4), KickerCards(ks, 2));
    });
  }

  add(Category::kNuke, RankIndex(Rank::kRedJoker), 1,
      KickerCards({RankIndex(Rank::kBlackJoker), RankIndex(Rank::kRedJoker)}, 1));
  return catalog;
}

const ActionCatalog& Catalog() {
  static const ActionCatalog catalog = EnumerateAllMoves();
  return catalog;
}

std::vector<int> ContainedGroups(const CardMultiset& hand) {
  const ActionCatalog& catalog = Catalog();
  std::vector<int> out;
  for (Rank r : kAllRanks) {
    if (hand.Count(r) == 0) continue;
    for (int index : catalog.GroupsWithLowestRank(r)) {
      if (hand.Contains(CardMultiset::FromPacked(catalog.packed(index)))) {
        out.push_back(index);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> LegalMoveIndices(const CardMultiset& hand,
                                  const std::optional<CardGroup>& incumbent) {
  std::vector<int> out = ContainedGroups(hand);
  if (!incumbent) return out;
  const ActionCatalog& catalog = Catalog();
  std::erase_if(out, [&](int index) {
    return !Beats(catalog.at(index).group(), *incumbent);
  });
  out.push_back(ActionCatalog::kPassIndex);
  return out;
}

std::vector<Move> LegalMoves(const CardMultiset& hand,
                             const std::optional<CardGroup>& incumbent) {
  const ActionCatalog& catalog = Catalog();
  std::vector<Move> out;
  for (int index : LegalMoveIndices(hand, incumbent)) out.push_back(catalog.at(index));
  return out;
}

}  // namespace ddz
