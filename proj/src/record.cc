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

#include "ddz/record.h"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ddz {
namespace {

using Kind = RecordError::Kind;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> Split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    out.push_back(Trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Move MoveFromCards(const CardMultiset& cards, int round) {
  if (cards.Empty()) return Move::Pass();
  const auto group = Classify(cards);
  if (!group) {
    throw RecordError(Kind::kIllegalMoveAtRound, round,
                      "round " + std::to_string(round) + ": not a card group: " +
                          FormatCards(cards));
  }
  return Move(*group);
}

Move ParseMove(std::string_view text, int round) {
  if (text == "None" || text == "Pass" || text == "pass" || text.empty()) {
    return Move::Pass();
  }
  return MoveFromCards(ParseCards(text), round);
}

std::string MoveText(const Move& move) {
  return move.IsPass() ? "None" : FormatCards(move.cards());
}

void FillInitialHands(GameRecord& record) {
  std::array<bool, kNumSeats> seen{};
  for (const RecordRow& row : record.rows) {
    if (!seen[SeatIndex(row.seat)]) {
      seen[SeatIndex(row.seat)] = true;
      record.initial_hands[SeatIndex(row.seat)] = row.hand;
    }
  }
  int missing = 0;
  CardMultiset known;
  try {
    for (Seat s : kAllSeats) {
      if (seen[SeatIndex(s)]) {
        known = known + record.initial_hands[SeatIndex(s)];
      } else {
        ++missing;
      }
    }
    if (missing == 1) {
      for (Seat s : kAllSeats) {
        if (!seen[SeatIndex(s)]) {
          record.initial_hands[SeatIndex(s)] = CardMultiset::FullDeck() - known;
        }
      }
    }
  } catch (const CardError& e) {
    throw RecordError(RecordError::Kind::kMalformed, 0,
                      std::string("initial hands overlap: ") + e.what());
  }
}

}  // namespace

GameRecord ExportRecord(const GameState& state) {
  GameRecord record;
  record.initial_hands = state.initial_hands();
  record.winner = state.winner();
  GameState replay = GameState::FromHands(state.initial_hands());
  for (const HistoryEntry& e : state.history()) {
    record.rows.push_back({replay.round(), e.seat, "", replay.hand(e.seat), e.move});
    replay = replay.Apply(e.move);
  }
  return record;
}

std::string RecordToText(const GameRecord& record) {
  std::ostringstream out;
  out << "# round | seat | hand | move\n";
  for (const RecordRow& row : record.rows) {
    out << row.round << " | " << SeatName(row.seat);
    if (!row.label.empty()) out << ": " << row.label;
    out << " | " << FormatCards(row.hand) << " | " << MoveText(row.move) << "\n";
  }
  if (record.winner) out << "# winner: " << SeatName(*record.winner) << "\n";
  return out.str();
}

GameRecord RecordFromText(std::string_view text) {
  GameRecord record;
  int line_number = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const std::string where = "line " + std::to_string(line_number) + ": ";
    if (trimmed.front() == '#') {
      const std::string_view body = Trim(trimmed.substr(1));
      constexpr std::string_view kWinner = "winner:";
      if (body.starts_with(kWinner)) {
        record.winner = SeatFromName(Trim(body.substr(kWinner.size())));
        if (!record.winner) throw RecordError(Kind::kMalformed, 0, where + "bad winner");
      }
      continue;
    }
    const auto fields = Split(trimmed, '|');
    if (fields.size() != 4) {
      throw RecordError(Kind::kMalformed, 0, where + "expected 4 fields");
    }
    RecordRow row;
    const auto [ptr, ec] =
        std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), row.round);
    if (ec != std::errc() || ptr != fields[0].data() + fields[0].size() || row.round < 1) {
      throw RecordError(Kind::kMalformed, 0, where + "bad round number");
    }
    const size_t colon = fields[1].find(':');
    const auto seat = SeatFromName(fields[1].substr(0, colon));
    if (!seat) throw RecordError(Kind::kMalformed, row.round, where + "bad seat");
    row.seat = *seat;
    if (colon != std::string_view::npos) row.label = Trim(fields[1].substr(colon + 1));
    try {
      row.hand = ParseCards(fields[2]);
      row.move = ParseMove(fields[3], row.round);
    } catch (const CardError& e) {
      throw RecordError(Kind::kMalformed, row.round, where + e.what());
    }
    record.rows.push_back(std::move(row));
  }
  if (record.rows.empty()) throw RecordError(Kind::kMalformed, 0, "record has no rows");
  FillInitialHands(record);
  return record;
}

nlohmann::json RecordToJson(const GameRecord& record) {
  nlohmann::json j;
  nlohmann::json initial = nlohmann::json::object();
  for (Seat s : kAllSeats) {
    initial[std::string(SeatName(s))] = FormatCards(record.initial_hands[SeatIndex(s)]);
  }
  j["initial_hands"] = initial;
  j["rows"] = nlohmann::json::array();
  for (const RecordRow& row : record.rows) {
    nlohmann::json r = {{"round", row.round},
                        {"seat", SeatName(row.seat)},
                        {"hand", FormatCards(row.hand)},
                        {"move", MoveText(row.move)}};
    if (!row.label.empty()) r["label"] = row.label;
    j["rows"].push_back(std::move(r));
  }
  j["winner"] = record.winner ? nlohmann::json(SeatName(*record.winner)) : nlohmann::json();
  return j;
}

GameRecord RecordFromJson(const nlohmann::json& j) {
  GameRecord record;
  try {
    for (Seat s : kAllSeats) {
      record.initial_hands[SeatIndex(s)] =
          ParseCards(j.at("initial_hands").at(std::string(SeatName(s))).get<std::string>());
    }
    for (const auto& r : j.at("rows")) {
      RecordRow row;
      row.round = r.at("round").get<int>();
      const auto seat = SeatFromName(r.at("seat").get<std::string>());
      if (!seat) throw RecordError(Kind::kMalformed, row.round, "bad seat");
      row.seat = *seat;
      row.label = r.value("label", "");
      row.hand = ParseCards(r.at("hand").get<std::string>());
      row.move = ParseMove(r.at("move").get<std::string>(), row.round);
      record.rows.push_back(std::move(row));
    }
    if (j.contains("winner") && !j.at("winner").is_null()) {
      record.winner = SeatFromName(j.at("winner").get<std::string>());
      if (!record.winner) throw RecordError(Kind::kMalformed, 0, "bad winner");
    }
  } catch (const nlohmann::json::exception& e) {
    throw RecordError(Kind::kMalformed, 0, e.what());
  } catch (const CardError& e) {
    throw RecordError(Kind::kMalformed, 0, e.what());
  }
  return record;
}

GameState ReplayRecord(const GameRecord& record) {
  GameState state = [&] {
    try {
      return GameState::FromHands(record.initial_hands);
    } catch (const std::exception& e) {
      throw RecordError(Kind::kMalformed, 0, std::string("bad initial hands: ") + e.what());
    }
  }();
  for (const RecordRow& row : record.rows) {
    const std::string where = "round " + std::to_string(row.round) + ", " +
                              std::string(SeatName(row.seat)) + ": ";
    if (state.IsTerminal()) {
      throw RecordError(Kind::kIllegalMoveAtRound, row.round, where + "game already over");
    }
    if (row.seat != state.to_act()) {
      throw RecordError(Kind::kIllegalMoveAtRound, row.round,
                        where + "expected " + std::string(SeatName(state.to_act())));
    }
    if (row.round != state.round()) {
      throw RecordError(Kind::kIllegalMoveAtRound, row.round,
                        where + "expected round " + std::to_string(state.round()));
    }
    if (row.hand != state.hand(row.seat)) {
      throw RecordError(Kind::kHandMismatch, row.round,
                        where + "hand should be " + FormatCards(state.hand(row.seat)));
    }
    if (!state.IsLegal(row.move)) {
      throw RecordError(Kind::kIllegalMoveAtRound, row.round,
                        where + "illegal move " + ToString(row.move));
    }
    state = state.Apply(row.move);
  }
  if (record.winner && record.winner != state.winner()) {
    throw RecordError(Kind::kMalformed, 0, "recorded winner disagrees with replay");
  }
  return state;
}

GameRecord LoadRecordFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RecordError(Kind::kMalformed, 0, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto end = text.find('\n', first);
    try {
      auto j = nlohmann::json::parse(text.substr(first, end == std::string::npos
                                                            ? std::string::npos
                                                            : end - first));
      return RecordFromJson(j);
    } catch (const nlohmann::json::parse_error&) {
      return RecordFromJson(nlohmann::json::parse(text, nullptr, false));
    }
  }
  return RecordFromText(text);
}

}  // namespace ddz
