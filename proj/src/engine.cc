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

#include "ddz/engine.h"

#include <algorithm>
#include <cctype>

namespace ddz {

std::string_view SeatName(Seat s) {
  switch (s) {
    case Seat::kLandlord:
      return "Landlord";
    case Seat::kPeasantDown:
      return "Peasant Down";
    case Seat::kPeasantUp:
      return "Peasant Up";
  }
  return "?";
}

std::optional<Seat> SeatFromName(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '_') {
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (key == "landlord") return Seat::kLandlord;
  if (key == "peasantdown" || key == "down") return Seat::kPeasantDown;
  if (key == "peasantup" || key == "up") return Seat::kPeasantUp;
  return std::nullopt;
}

std::vector<int> Observation::LegalMoveIndices() const {
  return ddz::LegalMoveIndices(own_hand, incumbent_group());
}

CardMultiset Observation::Unseen() const {
  CardMultiset unseen = CardMultiset::FullDeck() - own_hand;
  for (const CardMultiset& p : played) unseen = unseen - p;
  return unseen;
}

GameState GameState::Deal(std::mt19937_64& rng) {
  std::vector<Rank> deck = CardMultiset::FullDeck().Cards();
  std::shuffle(deck.begin(), deck.end(), rng);
  std::array<CardMultiset, kNumSeats> hands;
  for (int i = 0; i < kDeckSize; ++i) {
    const int seat = i < kLandlordHandSize ? 0 : 1 + (i - kLandlordHandSize) / kPeasantHandSize;
    hands[seat].Add(deck[i]);
  }
  return FromHands(hands);
}

GameState GameState::FromHands(const std::array<CardMultiset, kNumSeats>& hands) {
  CardMultiset total;
  for (const CardMultiset& h : hands) total = total + h;  // Throws past 4 copies.
  if (hands[0].Empty()) throw std::invalid_argument("landlord hand is empty");
  GameState state;
  state.initial_hands_ = hands;
  state.hands_ = hands;
  return state;
}

std::vector<int> GameState::LegalMoveIndices() const {
  if (IsTerminal()) return {};
  return ddz::LegalMoveIndices(
      hand(to_act_),
      incumbent_ ? std::optional<CardGroup>(incumbent_->group) : std::nullopt);
}

bool GameState::IsLegal(const Move& move) const {
  if (IsTerminal()) return false;
  if (move.IsPass()) return incumbent_.has_value();
  if (!hand(to_act_).Contains(move.cards())) return false;
  return !incumbent_ || Beats(move.group(), incumbent_->group);
}

GameState GameState::Apply(const Move& move) const {
  if (IsTerminal()) throw GameOverError("game is over");
  if (!IsLegal(move)) {
    throw IllegalMoveError(std::string(SeatName(to_act_)) + " cannot play " +
                           ToString(move));
  }
  GameState next = *this;
  const Seat seat = to_act_;
  next.history_.push_back({seat, move});
  if (move.IsPass()) {
    ++next.pass_streak_;
    if (next.pass_streak_ == 2) {
      next.to_act_ = next.incumbent_->seat;
      next.incumbent_.reset();
      next.pass_streak_ = 0;
    } else {
      next.to_act_ = NextSeat(seat);
    }
  } else {
    CardMultiset& hand = next.hands_[SeatIndex(seat)];
    hand = hand - move.cards();
    next.incumbent_ = Incumbent{seat, move.group()};
    next.pass_streak_ = 0;
    next.to_act_ = NextSeat(seat);
    if (hand.Empty()) next.winner_ = seat;
  }
  if (!next.IsTerminal() && next.to_act_ == Seat::kLandlord) ++next.round_;
  return next;
}

std::array<int, kNumSeats> GameState::Rewards() const {
  if (!IsTerminal()) throw NotTerminalError("game is not over");
  std::array<int, kNumSeats> out{};
  for (Seat s : kAllSeats) out[SeatIndex(s)] = SameTeam(s, *winner_) ? 1 : -1;
  return out;
}

Observation GameState::Observe(Seat seat) const {
  Observation obs;
  obs.seat = seat;
  obs.own_hand = hand(seat);
  for (Seat s : kAllSeats) {
    obs.hand_sizes[SeatIndex(s)] = hand(s).Size();
    obs.played[SeatIndex(s)] = initial_hands_[SeatIndex(s)] - hand(s);
  }
  obs.incumbent = incumbent_;
  for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
    if (it->seat == PrevSeat(seat) && !obs.prev_move) obs.prev_move = it->move;
    if (it->seat == NextSeat(seat) && !obs.next_move) obs.next_move = it->move;
    if (obs.prev_move && obs.next_move) break;
  }
  obs.history = history_;
  return obs;
}

}  // namespace ddz
