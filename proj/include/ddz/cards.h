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

#ifndef DDZ_CARDS_H_
#define DDZ_CARDS_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddz {

inline constexpr int kNumRanks = 15;
inline constexpr int kDeckSize = 54;
inline constexpr int kMaxHandSize = 20;

// Ranks in playing order. Suits play no role in the game.
enum class Rank : std::uint8_t {
  kThree,
  kFour,
  kFive,
  kSix,
  kSeven,
  kEight,
  kNine,
  kTen,
  kJack,
  kQueen,
  kKing,
  kAce,
  kTwo,
  kBlackJoker,
  kRedJoker,
};

inline constexpr std::array<Rank, kNumRanks> kAllRanks = {
    Rank::kThree, Rank::kFour,  Rank::kFive,       Rank::kSix,
    Rank::kSeven, Rank::kEight, Rank::kNine,       Rank::kTen,
    Rank::kJack,  Rank::kQueen, Rank::kKing,       Rank::kAce,
    Rank::kTwo,   Rank::kBlackJoker, Rank::kRedJoker};

// Runs (sequential solos, pairs, trios) never extend past the ace.
inline constexpr Rank kHighestRunRank = Rank::kAce;

constexpr int RankIndex(Rank r) { return static_cast<int>(r); }
constexpr Rank RankFromIndex(int index) { return static_cast<Rank>(index); }

// Numeric value: 3..9 literal, T=10, J=11, Q=12, K=13, A=14, 2=15,
// black joker 16, red joker 17.
constexpr int RankValue(Rank r) { return RankIndex(r) + 3; }

constexpr bool IsJoker(Rank r) { return r >= Rank::kBlackJoker; }
constexpr int MaxCopies(Rank r) { return IsJoker(r) ? 1 : 4; }

// '3'..'9', 'T', 'J', 'Q', 'K', 'A', '2', '*' (black joker), '$' (red joker).
char RankSymbol(Rank r);
std::optional<Rank> RankFromSymbol(char symbol);

// Raised for malformed card strings and impossible card counts.
class CardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Multiset of cards stored as fifteen 4-bit counters in one 64-bit word.
class CardMultiset {
 public:
  constexpr CardMultiset() = default;

  static constexpr CardMultiset FromPacked(std::uint64_t packed) {
    CardMultiset m;
    m.packed_ = packed;
    return m;
  }
  // Throws CardError if any count exceeds the deck limit.
  static CardMultiset FromCounts(const std::array<int, kNumRanks>& counts);
  static CardMultiset FullDeck();

  int Count(Rank r) const {
    return static_cast<int>((packed_ >> (4 * RankIndex(r))) & 0xF);
  }
  std::array<int, kNumRanks> Counts() const;
  int Size() const;
  bool Empty() const { return packed_ == 0; }

  // True iff `other` is a sub-multiset of this one.
  bool Contains(const CardMultiset& other) const {
    constexpr std::uint64_t kGuard = 0x0888888888888888ULL;
    return (((packed_ | kGuard) - other.packed_) & kGuard) == kGuard;
  }

  // Both throw CardError on overflow / underflow.
  void Add(Rank r, int n = 1);
  void Remove(Rank r, int n = 1);
  CardMultiset operator+(const CardMultiset& other) const;
  CardMultiset operator-(const CardMultiset& other) const;

  std::optional<Rank> LowestRank() const;
  // One entry per card, ascending.
  std::vector<Rank> Cards() const;

  std::uint64_t Packed() const { return packed_; }

  friend bool operator==(const CardMultiset&, const CardMultiset&) = default;
  friend auto operator<=>(const CardMultiset&, const CardMultiset&) = default;

 private:
  std::uint64_t packed_ = 0;
};

// Comma-separated card notation, e.g. "3,3,T,*". Empty multiset -> "".
std::string FormatCards(const CardMultiset& cards);
// Accepts comma-separated or contiguous notation; whitespace is ignored.
CardMultiset ParseCards(std::string_view text);

enum class Category : std::uint8_t {
  kNone,
  kSolo,
  kPair,
  kTrio,
  kSequentialSolos,
  kSequentialPairs,
  kSequentialTriosTakeNone,
  kSequentialTriosTakeOne,
  kSequentialTriosTakeTwo,
  kSequentialTriosSeriesTakeOne,
  kSequentialTriosSeriesTakeTwo,
  kBomb,
  kFourTakeTwoSolos,
  kFourTakeTwoPairs,
  kNuke,
};
inline constexpr int kNumCategories = 15;

std::string_view CategoryName(Category c);
std::optional<Category> CategoryFromName(std::string_view name);

// A classified playable combination.
struct CardGroup {
  CardMultiset cards;
  Category category = Category::kNone;
  // Highest rank among the principal (non-kicker) cards.
  Rank principal = Rank::kThree;
  // Number of distinct principal ranks: 1 for non-runs, 0 for None.
  int run_length = 0;
  CardMultiset kickers;

  CardMultiset PrincipalCards() const { return cards - kickers; }
  // Kicker units: solo kickers count one each, pair kickers one per pair.
  int KickerUnits() const;

  friend bool operator==(const CardGroup&, const CardGroup&) = default;
};

std::string ToString(const CardGroup& group);

// Returns the unique legal parse of `cards`, the None group for the empty
// multiset, or nullopt when the cards form no legal group.
std::optional<CardGroup> Classify(const CardMultiset& cards);

// Exact score stored in half-points; every category weight is a multiple
// of 1/2.
class Score {
 public:
  constexpr Score() = default;
  static constexpr Score FromHalves(std::int64_t halves) {
    Score s;
    s.halves_ = halves;
    return s;
  }
  static constexpr Score FromInt(std::int64_t v) { return FromHalves(2 * v); }

  constexpr std::int64_t halves() const { return halves_; }
  double ToDouble() const { return static_cast<double>(halves_) / 2.0; }
  std::string ToString() const;

  constexpr Score operator+(Score o) const { return FromHalves(halves_ + o.halves_); }
  constexpr Score operator-(Score o) const { return FromHalves(halves_ - o.halves_); }
  constexpr Score& operator+=(Score o) {
    halves_ += o.halves_;
    return *this;
  }
  friend constexpr auto operator<=>(Score, Score) = default;

 private:
  std::int64_t halves_ = 0;
};

// Category weight r(C); MaxCard is the value of the principal rank.
Score CategoryScore(const CardGroup& group);

// True iff `candidate` may be played over `incumbent`. Kicker ranks are
// ignored; a bomb beats every non-bomb, non-nuke group; the nuke beats all.
bool Beats(const CardGroup& candidate, const CardGroup& incumbent);

}  // namespace ddz

#endif  // DDZ_CARDS_H_
