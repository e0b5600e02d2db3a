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

#ifndef DDZ_ENGINE_H_
#define DDZ_ENGINE_H_

#include <array>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddz/cards.h"
#include "ddz/movegen.h"

namespace ddz {

// Turn order is Landlord, PeasantDown, PeasantUp, then Landlord again.
enum class Seat : std::uint8_t { kLandlord = 0, kPeasantDown = 1, kPeasantUp = 2 };

inline constexpr int kNumSeats = 3;
inline constexpr std::array<Seat, kNumSeats> kAllSeats = {
    Seat::kLandlord, Seat::kPeasantDown, Seat::kPeasantUp};
inline constexpr int kLandlordHandSize = 20;
inline constexpr int kPeasantHandSize = 17;

constexpr int SeatIndex(Seat s) { return static_cast<int>(s); }
constexpr Seat NextSeat(Seat s) { return static_cast<Seat>((SeatIndex(s) + 1) % 3); }
constexpr Seat PrevSeat(Seat s) { return static_cast<Seat>((SeatIndex(s) + 2) % 3); }
constexpr bool IsPeasant(Seat s) { return s != Seat::kLandlord; }
constexpr bool SameTeam(Seat a, Seat b) { return a == b || (IsPeasant(a) && IsPeasant(b)); }

// "Landlord", "Peasant Down", "Peasant Up".
std::string_view SeatName(Seat s);
// Accepts the display names, with or without the space, case-insensitively,
// plus "landlord"/"down"/"up".
std::optional<Seat> SeatFromName(std::string_view name);

class IllegalMoveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class GameOverError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};
class NotTerminalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Incumbent {
  Seat seat;
  CardGroup group;
  friend bool operator==(const Incumbent&, const Incumbent&) = default;
};

struct HistoryEntry {
  Seat seat;
  Move move;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

// What one seat can see.
struct Observation {
  Seat seat = Seat::kLandlord;
  CardMultiset own_hand;
  std::array<int, kNumSeats> hand_sizes{};
  std::optional<Incumbent> incumbent;
  // Most recent move of the previous and of the next seat, if they moved.
  std::optional<Move> prev_move;
  std::optional<Move> next_move;
  // Cards each seat has played so far.
  std::array<CardMultiset, kNumSeats> played;
  std::vector<HistoryEntry> history;

  std::optional<CardGroup> incumbent_group() const {
    return incumbent ? std::optional<CardGroup>(incumbent->group) : std::nullopt;
  }
  // Catalog indices; see LegalMoveIndices in movegen.h.
  std::vector<int> LegalMoveIndices() const;
  // Cards this seat has not seen: the deck minus its own hand and all played
  // cards.
  CardMultiset Unseen() const;
};

// Referee state. Transitions return new states and leave the input intact.
class GameState {
 public:
  // Landlord gets 20 cards, each peasant 17. Landlord acts first.
  static GameState Deal(std::mt19937_64& rng);
  // Starts a game from explicit hands; they must be disjoint parts of one
  // deck and the landlord's hand must not be empty.
  static GameState FromHands(const std::array<CardMultiset, kNumSeats>& hands);

  const CardMultiset& hand(Seat s) const { return hands_[SeatIndex(s)]; }
  const std::array<CardMultiset, kNumSeats>& hands() const { return hands_; }
  const std::array<CardMultiset, kNumSeats>& initial_hands() const {
    return initial_hands_;
  }
  const std::vector<HistoryEntry>& history() const { return history_; }
  const std::optional<Incumbent>& incumbent() const { return incumbent_; }
  int pass_streak() const { return pass_streak_; }
  Seat to_act() const { return to_act_; }
  std::optional<Seat> winner() const { return winner_; }
  bool IsTerminal() const { return winner_.has_value(); }
  // Number of turns the landlord has started, counting the current one.
  int round() const { return round_; }

  std::vector<int> LegalMoveIndices() const;
  bool IsLegal(const Move& move) const;

  // Throws GameOverError when terminal and IllegalMoveError when `move` is
  // not legal for the seat to act.
  GameState Apply(const Move& move) const;

  // +1 for the winning team, -1 for the other. Throws NotTerminalError.
  std::array<int, kNumSeats> Rewards() const;

  Observation Observe(Seat seat) const;

  friend bool operator==(const GameState&, const GameState&) = default;

 private:
  GameState() = default;

  std::array<CardMultiset, kNumSeats> initial_hands_;
  std::array<CardMultiset, kNumSeats> hands_;
  std::vector<HistoryEntry> history_;
  std::optional<Incumbent> incumbent_;
  int pass_streak_ = 0;
  Seat to_act_ = Seat::kLandlord;
  std::optional<Seat> winner_;
  int round_ = 1;
};

}  // namespace ddz

#endif  // DDZ_ENGINE_H_
