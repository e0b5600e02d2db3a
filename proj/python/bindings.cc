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

// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the ddz package.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cctype>
#include <map>
#include <sstream>

#include "ddz/arena.h"
#include "ddz/cli.h"
#include "ddz/decomp.h"
#include "ddz/engine.h"
#include "ddz/movegen.h"
#include "ddz/record.h"
#include "ddz/rhcp.h"

namespace py = pybind11;

namespace ddz {
namespace {

std::string MoveString(const Move& m) { return m.IsPass() ? "Pass" : FormatCards(m.cards()); }

std::optional<CardGroup> IncumbentArg(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  const auto group = Classify(ParseCards(*text));
  if (!group) throw py::value_error("not a card group: " + *text);
  return group;
}

Seat SeatArg(const std::string& name) {
  const auto seat = SeatFromName(name);
  if (!seat) throw py::value_error("unknown seat: " + name);
  return *seat;
}

Move MoveArg(const std::string& text) {
  std::string lowered;
  for (char c : text) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lowered == "pass") return Move::Pass();
  const auto group = Classify(ParseCards(text));
  if (!group) throw py::value_error("not a card group: " + text);
  return Move(*group);
}

// A mutable wrapper over the immutable GameState.
class Game {
 public:
  explicit Game(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    state_ = std::make_unique<GameState>(GameState::Deal(rng));
  }
  Game(const std::string& landlord, const std::string& down, const std::string& up)
      : state_(std::make_unique<GameState>(
            GameState::FromHands({ParseCards(landlord), ParseCards(down), ParseCards(up)}))) {}

  std::string to_act() const { return std::string(SeatName(state_->to_act())); }
  std::string hand(const std::string& seat) const {
    return FormatCards(state_->hand(SeatArg(seat)));
  }
  std::vector<std::string> legal_moves() const {
    std::vector<std::string> out;
    for (int index : state_->LegalMoveIndices()) out.push_back(MoveString(Catalog().at(index)));
    return out;
  }
  void play(const std::string& text) {
    const Move move = MoveArg(text);
    if (!state_->IsLegal(move)) throw py::value_error("illegal move: " + text);
    state_ = std::make_unique<GameState>(state_->Apply(move));
  }
  bool finished() const { return state_->IsTerminal(); }
  std::optional<std::string> winner() const {
    if (!state_->winner()) return std::nullopt;
    return std::string(SeatName(*state_->winner()));
  }
  std::string record_json() const { return RecordToJson(ExportRecord(*state_)).dump(); }

 private:
  std::unique_ptr<GameState> state_;
};

}  // namespace
}  // namespace ddz

PYBIND11_MODULE(_ddz, m) {
  using namespace ddz;
  m.doc() = "Dou Di Zhu engine bindings";

  py::register_exception<CardError>(m, "CardError", PyExc_ValueError);

  m.def("catalog_size", [] { return Catalog().size(); });
  m.def("category_counts", [] {
    std::map<std::string, int> out;
    const auto counts = Catalog().CategoryCounts();
    for (int c = 1; c < kNumCategories; ++c) {
      out[std::string(CategoryName(static_cast<Category>(c)))] = counts[c];
    }
    return out;
  });
  m.def("normalize_cards", [](const std::string& text) { return FormatCards(ParseCards(text)); });
  m.def(
      "classify",
      [](const std::string& text) -> std::optional<std::string> {
        const auto group = Classify(ParseCards(text));
        if (!group) return std::nullopt;
        return std::string(CategoryName(group->category));
      },
      py::arg("cards"));
  m.def(
      "legal_moves",
      [](const std::string& hand, const std::optional<std::string>& incumbent) {
        std::vector<std::string> out;
        for (const Move& mv : LegalMoves(ParseCards(hand), IncumbentArg(incumbent))) {
          out.push_back(MoveString(mv));
        }
        return out;
      },
      py::arg("hand"), py::arg("incumbent") = py::none());
  m.def(
      "decompositions",
      [](const std::string& hand, int limit, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::vector<std::vector<std::string>> out;
        for (const Decomposition& d :
             SampleDecompositions(ParseCards(hand), limit, rng).decompositions) {
          std::vector<std::string> groups;
          for (int index : d.groups) groups.push_back(FormatCards(Catalog().at(index).cards()));
          out.push_back(std::move(groups));
        }
        return out;
      },
      py::arg("hand"), py::arg("limit") = kDefaultSampleLimit, py::arg("seed") = 1);
  m.def(
      "rhcp_best_group",
      [](const std::string& hand) {
        Rhcp rhcp;
        const Rhcp::Choice c = rhcp.BestGroup(ParseCards(hand));
        return py::make_tuple(FormatCards(Catalog().at(c.index).cards()), c.score.ToDouble());
      },
      py::arg("hand"));
  m.def(
      "rhcp_act",
      [](const std::string& hand, const std::optional<std::string>& incumbent) {
        Rhcp rhcp;
        return MoveString(rhcp.Act(ParseCards(hand), IncumbentArg(incumbent)));
      },
      py::arg("hand"), py::arg("incumbent") = py::none());
  m.def(
      "replay_record_json",
      [](const std::string& path) {
        try {
          const GameRecord record = LoadRecordFile(path);
          ReplayRecord(record);
          return RecordToJson(record).dump();
        } catch (const RecordError& e) {
          throw py::value_error(e.what());
        }
      },
      py::arg("path"));
  m.def(
      "run_match_json",
      [](const std::string& landlord, const std::string& down, const std::string& up,
         int episodes, int repeats, std::uint64_t seed) {
        MatchOptions options;
        options.episodes = episodes;
        options.repeats = repeats;
        options.seed = seed;
        std::array<AgentFactory, kNumSeats> seats = {
            MakeAgentFactory(ParseAgentSpec(landlord)), MakeAgentFactory(ParseAgentSpec(down)),
            MakeAgentFactory(ParseAgentSpec(up))};
        py::gil_scoped_release release;
        return ToJson(RunMatch(seats, options)).dump();
      },
      py::arg("landlord"), py::arg("down"), py::arg("up"), py::arg("episodes") = 100,
      py::arg("repeats") = 1, py::arg("seed") = 1);
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = RunCli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));

  py::class_<Game>(m, "Game")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def(py::init<const std::string&, const std::string&, const std::string&>(),
           py::arg("landlord"), py::arg("down"), py::arg("up"))
      .def_property_readonly("to_act", &Game::to_act)
      .def_property_readonly("finished", &Game::finished)
      .def_property_readonly("winner", &Game::winner)
      .def("hand", &Game::hand, py::arg("seat"))
      .def("legal_moves", &Game::legal_moves)
      .def("play", &Game::play, py::arg("move"))
      .def("record_json", &Game::record_json);
}
