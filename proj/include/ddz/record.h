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

// Game records. The text form has one line per turn:
//
//   <round> | <seat>[: <label>] | <hand before the move> | <move or None>
//
// Rounds are numbered by landlord turns. Cards use the symbols of
// ParseCards. Lines that are blank or start with '#' are ignored.

#ifndef DDZ_RECORD_H_
#define DDZ_RECORD_H_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddz/engine.h"
#include "json.hpp"

namespace ddz {

struct RecordRow {
  int round = 0;
  Seat seat = Seat::kLandlord;
  // Free text after the seat name, e.g. the player's name.
  std::string label;
  CardMultiset hand;
  Move move = Move::Pass();

  friend bool operator==(const RecordRow&, const RecordRow&) = default;
};

struct GameRecord {
  std::array<CardMultiset, kNumSeats> initial_hands;
  std::vector<RecordRow> rows;
  std::optional<Seat> winner;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

class RecordError : public std::runtime_error {
 public:
  enum class Kind { kMalformed, kIllegalMoveAtRound, kHandMismatch };

  RecordError(Kind kind, int round, const std::string& what)
      : std::runtime_error(what), kind_(kind), round_(round) {}

  Kind kind() const { return kind_; }
  // Round of the offending row; 0 when unknown.
  int round() const { return round_; }

 private:
  Kind kind_;
  int round_;
};

GameRecord ExportRecord(const GameState& state);

std::string RecordToText(const GameRecord& record);
// Throws RecordError(kMalformed). Initial hands come from each seat's first
// row; a seat with no rows gets the rest of the deck.
GameRecord RecordFromText(std::string_view text);

nlohmann::json RecordToJson(const GameRecord& record);
// Throws RecordError(kMalformed).
GameRecord RecordFromJson(const nlohmann::json& j);

// Replays every row from the initial hands. Throws RecordError with
// kIllegalMoveAtRound for an illegal move, out-of-turn row or a bad round
// number, kHandMismatch when a row's hand differs from the replayed hand, and
// kMalformed when the recorded winner disagrees with the replay.
GameState ReplayRecord(const GameRecord& record);

// Reads a record file: JSON (object or first JSONL line) when the first
// non-space character is '{', text otherwise.
GameRecord LoadRecordFile(const std::string& path);

}  // namespace ddz

#endif  // DDZ_RECORD_H_
