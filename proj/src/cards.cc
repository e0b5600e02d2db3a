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

#include "ddz/cards.h"

#include <cctype>
#include <string>

namespace ddz {
namespace {

constexpr std::string_view kSymbols = "3456789TJQKA2*$";

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "None",
    "Solo",
    "Pair",
    "Trio",
    "SequentialSolos",
    "SequentialPairs",
    "SequentialTriosTakeNone",
    "SequentialTriosTakeOne",
    "SequentialTriosTakeTwo",
    "SequentialTriosSeriesTakeOne",
    "SequentialTriosSeriesTakeTwo",
    "Bomb",
    "FourTakeTwoSolos",
    "FourTakeTwoPairs",
    "Nuke",
};

CardMultiset Nuke() {
  CardMultiset m;
  m.Add(Rank::kBlackJoker);
  m.Add(Rank::kRedJoker);
  return m;
}

// Ranks [first, first + length) all present with exactly `copies` copies and
// ending no higher than the ace.
bool IsRun(const std::array<int, kNumRanks>& counts, int first, int length,
           int copies) {
  if (first + length - 1 > RankIndex(kHighestRunRank)) return false;
  for (int i = first; i < first + length; ++i) {
    if (counts[i] != copies) return false;
  }
  return true;
}

CardGroup Make(const CardMultiset& cards, Category category, int principal,
               int run_length, const CardMultiset& kickers = {}) {
  CardGroup g;
  g.cards = cards;
  g.category = category;
  g.principal = RankFromIndex(principal);
  g.run_length = run_length;
  g.kickers = kickers;
  return g;
}

}  // namespace

char RankSymbol(Rank r) { return kSymbols[RankIndex(r)]; }

std::optional<Rank> RankFromSymbol(char symbol) {
  const auto pos = kSymbols.find(static_cast<char>(std::toupper(symbol)));
  if (pos == std::string_view::npos) return std::nullopt;
  return RankFromIndex(static_cast<int>(pos));
}

CardMultiset CardMultiset::FromCounts(const std::array<int, kNumRanks>& counts) {
  CardMultiset m;
  for (int i = 0; i < kNumRanks; ++i) m.Add(RankFromIndex(i), counts[i]);
  return m;
}

CardMultiset CardMultiset::FullDeck() {
  CardMultiset m;
  for (Rank r : kAllRanks) m.Add(r, MaxCopies(r));
  return m;
}

std::array<int, kNumRanks> CardMultiset::Counts() const {
  std::array<int, kNumRanks> counts{};
  for (int i = 0; i < kNumRanks; ++i) counts[i] = Count(RankFromIndex(i));
  return counts;
}

int CardMultiset::Size() const {
  std::uint64_t x = packed_;
  x = (x & 0x0F0F0F0F0F0F0F0FULL) + ((x >> 4) & 0x0F0F0F0F0F0F0F0FULL);
  return static_cast<int>((x * 0x0101010101010101ULL) >> 56);
}

void CardMultiset::Add(Rank r, int n) {
  if (n < 0) throw CardError("negative card count");
  const int next = Count(r) + n;
  if (next > MaxCopies(r)) {
    throw CardError(std::string("too many copies of ") + RankSymbol(r));
  }
  packed_ += static_cast<std::uint64_t>(n) << (4 * RankIndex(r));
}

void CardMultiset::Remove(Rank r, int n) {
  if (n < 0 || Count(r) < n) {
    throw CardError(std::string("not enough copies of ") + RankSymbol(r));
  }
  packed_ -= static_cast<std::uint64_t>(n) << (4 * RankIndex(r));
}

CardMultiset CardMultiset::operator+(const CardMultiset& other) const {
  CardMultiset out = *this;
  for (Rank r : kAllRanks) out.Add(r, other.Count(r));
  return out;
}

CardMultiset CardMultiset::operator-(const CardMultiset& other) const {
  if (!Contains(other)) throw CardError("cards are not a subset of the hand");
  return FromPacked(packed_ - other.packed_);
}

std::optional<Rank> CardMultiset::LowestRank() const {
  if (packed_ == 0) return std::nullopt;
  const int bit = __builtin_ctzll(packed_);
  return RankFromIndex(bit / 4);
}

std::vector<Rank> CardMultiset::Cards() const {
  std::vector<Rank> out;
  out.reserve(Size());
  for (Rank r : kAllRanks) {
    for (int c = 0; c < Count(r); ++c) out.push_back(r);
  }
  return out;
}

std::string FormatCards(const CardMultiset& cards) {
  std::string out;
  for (Rank r : cards.Cards()) {
    if (!out.empty()) out.push_back(',');
    out.push_back(RankSymbol(r));
  }
  return out;
}

CardMultiset ParseCards(std::string_view text) {
  CardMultiset out;
  for (char ch : text) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) continue;
    const auto rank = RankFromSymbol(ch);
    if (!rank) throw CardError(std::string("unknown card symbol '") + ch + "'");
    out.Add(*rank);
  }
  return out;
}

std::string_view CategoryName(Category c) {
  return kCategoryNames[static_cast<int>(c)];
}

std::optional<Category> CategoryFromName(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

int CardGroup::KickerUnits() const {
  switch (category) {
    case Category::kSequentialTriosTakeOne:
    case Category::kSequentialTriosSeriesTakeOne:
    case Category::kFourTakeTwoSolos:
      return kickers.Size();
    case Category::kSequentialTriosTakeTwo:
    case Category::kSequentialTriosSeriesTakeTwo:
    case Category::kFourTakeTwoPairs:
      return kickers.Size() / 2;
    default:
      return 0;
  }
}

std::string ToString(const CardGroup& group) {
  std::string out(CategoryName(group.category));
  out += "(";
  out += FormatCards(group.cards);
  out += ")";
  return out;
}

std::optional<CardGroup> Classify(const CardMultiset& cards) {
  const int size = cards.Size();
  if (size == 0) return Make(cards, Category::kNone, 0, 0);
  if (size > kMaxHandSize) return std::nullopt;
  if (cards == Nuke()) return Make(cards, Category::kNuke, RankIndex(Rank::kRedJoker), 1);

  const auto counts = cards.Counts();
  int distinct = 0;
  int lowest = -1;
  int highest = -1;
  std::array<std::vector<int>, 5> by_count;
  for (int i = 0; i < kNumRanks; ++i) {
    if (counts[i] == 0) continue;
    ++distinct;
    if (lowest < 0) lowest = i;
    highest = i;
    by_count[counts[i]].push_back(i);
  }

  if (distinct == 1) {
    switch (size) {
      case 1: return Make(cards, Category::kSolo, lowest, 1);
      case 2: return Make(cards, Category::kPair, lowest, 1);
      case 3: return Make(cards, Category::kTrio, lowest, 1);
      case 4: return Make(cards, Category::kBomb, lowest, 1);
    }
    return std::nullopt;
  }

  // A kicker set may never be exactly the nuke.
  auto kickers_ok = [](const CardMultiset& kickers) { return !(kickers == Nuke()); };

  // Four of a kind with two distinct solos or two distinct pairs.
  if (!by_count[4].empty()) {
    if (by_count[4].size() != 1) return std::nullopt;
    const int quad = by_count[4][0];
    CardMultiset kickers = cards;
    kickers.Remove(RankFromIndex(quad), 4);
    if (size == 6 && by_count[1].size() == 2 && kickers_ok(kickers)) {
      return Make(cards, Category::kFourTakeTwoSolos, quad, 1, kickers);
    }
    if (size == 8 && by_count[2].size() == 2) {
      return Make(cards, Category::kFourTakeTwoPairs, quad, 1, kickers);
    }
    return std::nullopt;
  }

  const int span = highest - lowest + 1;
  if (by_count[2].empty() && by_count[3].empty()) {
    if (size >= 5 && span == size && IsRun(counts, lowest, size, 1)) {
      return Make(cards, Category::kSequentialSolos, highest, size);
    }
    return std::nullopt;
  }
  if (by_count[1].empty() && by_count[3].empty()) {
    const int length = size / 2;
    if (length >= 3 && span == length && IsRun(counts, lowest, length, 2)) {
      return Make(cards, Category::kSequentialPairs, highest, length);
    }
    return std::nullopt;
  }
  if (by_count[3].empty()) return std::nullopt;

  // Every trio must belong to the principal run; kickers never repeat ranks.
  const auto& trios = by_count[3];
  const int length = static_cast<int>(trios.size());
  const int first = trios.front();
  const int last = trios.back();
  if (last - first + 1 != length) return std::nullopt;
  if (length >= 2 && !IsRun(counts, first, length, 3)) return std::nullopt;

  CardMultiset kickers = cards;
  for (int t : trios) kickers.Remove(RankFromIndex(t), 3);
  if (kickers.Empty()) {
    if (length == 1) return Make(cards, Category::kTrio, last, 1);
    return Make(cards, Category::kSequentialTriosTakeNone, last, length);
  }
  const int solos = static_cast<int>(by_count[1].size());
  const int pairs = static_cast<int>(by_count[2].size());
  if (pairs == 0 && solos == length && kickers_ok(kickers)) {
    return Make(cards,
                length == 1 ? Category::kSequentialTriosTakeOne
                            : Category::kSequentialTriosSeriesTakeOne,
                last, length, kickers);
  }
  if (solos == 0 && pairs == length) {
    return Make(cards,
                length == 1 ? Category::kSequentialTriosTakeTwo
                            : Category::kSequentialTriosSeriesTakeTwo,
                last, length, kickers);
  }
  return std::nullopt;
}

std::string Score::ToString() const {
  std::string out = std::to_string(halves_ / 2);
  if (halves_ % 2 != 0) {
    if (halves_ < 0 && halves_ / 2 == 0) out = "-0";
    out += ".5";
  }
  return out;
}

Score CategoryScore(const CardGroup& group) {
  const std::int64_t max_card = RankValue(group.principal);
  switch (group.category) {
    case Category::kNone:
      return Score::FromInt(0);
    case Category::kSolo:
    case Category::kPair:
    case Category::kTrio:
    case Category::kSequentialTriosTakeOne:
    case Category::kSequentialTriosTakeTwo:
      return Score::FromInt(max_card - 10);
    case Category::kSequentialSolos:
    case Category::kSequentialPairs:
    case Category::kSequentialTriosTakeNone:
      return Score::FromInt(max_card - 10 + 1);
    case Category::kSequentialTriosSeriesTakeOne:
    case Category::kSequentialTriosSeriesTakeTwo:
      return Score::FromHalves(max_card - 3 + 1);
    case Category::kBomb:
      return Score::FromInt(max_card - 3 + 7);
    case Category::kFourTakeTwoSolos:
    case Category::kFourTakeTwoPairs:
      return Score::FromHalves(max_card - 3);
    case Category::kNuke:
      return Score::FromInt(20);
  }
  return Score::FromInt(0);
}

bool Beats(const CardGroup& candidate, const CardGroup& incumbent) {
  if (candidate.category == Category::kNone || incumbent.category == Category::kNone) {
    return false;
  }
  if (candidate.category == Category::kNuke) return incumbent.category != Category::kNuke;
  if (incumbent.category == Category::kNuke) return false;
  if (candidate.category == Category::kBomb && incumbent.category != Category::kBomb) {
    return true;
  }
  return candidate.category == incumbent.category &&
         candidate.run_length == incumbent.run_length &&
         candidate.principal > incumbent.principal;
}

}  // namespace ddz
