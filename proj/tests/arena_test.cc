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

#include "ddz/arena.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "ddz/record.h"
#include "doctest.h"

namespace ddz {
namespace {

GameState Hands(const char* landlord, const char* down, const char* up) {
  return GameState::FromHands({ParseCards(landlord), ParseCards(down), ParseCards(up)});
}

std::array<AgentFactory, kNumSeats> All(const AgentSpec& spec) {
  const AgentFactory f = MakeAgentFactory(spec);
  return {f, f, f};
}

TEST_CASE("random agent edge cases") {
  RandomAgent agent;
  std::mt19937_64 rng(1);
  const GameState lead = Hands("3", "4", "5");
  for (int i = 0; i < 20; ++i) {
    CHECK(agent.Act(lead.Observe(Seat::kLandlord), rng) == Catalog().at(*Catalog().IndexOf(ParseCards("3"))));
  }
  const GameState respond = Hands("2,3", "4", "5").Apply(Move(*Classify(ParseCards("2"))));
  for (int i = 0; i < 20; ++i) {
    CHECK(agent.Act(respond.Observe(Seat::kPeasantDown), rng).IsPass());
  }
}

TEST_CASE("random agent is uniform over legal moves") {
  RandomAgent agent;
  std::mt19937_64 rng(2);
  const GameState state =
      Hands("3,3,4,5,6,7,8", "9,9,T", "J,Q").Apply(Move(*Classify(ParseCards("33"))));
  const Observation obs = state.Observe(Seat::kPeasantDown);
  const std::vector<int> legal = obs.LegalMoveIndices();
  REQUIRE(legal.size() == 2);  // 99 and Pass.
  const GameState lead = Hands("3,3,4,5,6,7,8", "9", "T");
  const Observation lobs = lead.Observe(Seat::kLandlord);
  const std::vector<int> many = lobs.LegalMoveIndices();
  REQUIRE(many.size() == 10);
  std::map<int, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[Catalog().IndexOf(agent.Act(lobs, rng))];
  CHECK(counts.size() == many.size());
  const double expected = static_cast<double>(draws) / many.size();
  double chi2 = 0;
  for (int index : many) chi2 += std::pow(counts[index] - expected, 2) / expected;
  // Wilson-Hilferty upper 0.1% point.
  const double df = many.size() - 1.0;
  const double z = 3.09;
  const double crit = df * std::pow(1 - 2 / (9 * df) + z * std::sqrt(2 / (9 * df)), 3);
  CHECK(chi2 < crit);
}

TEST_CASE("scripted agent follows its moves then falls back") {
  const GameState state = Hands("3,4,5,6,7", "9", "T");
  ScriptedAgent agent({Move(*Classify(ParseCards("5"))), Move(*Classify(ParseCards("K")))});
  std::mt19937_64 rng(0);
  CHECK(agent.Act(state.Observe(Seat::kLandlord), rng) == Move(*Classify(ParseCards("5"))));
  // K is not in hand: lowest legal index instead.
  CHECK(agent.Act(state.Observe(Seat::kLandlord), rng) == Move(*Classify(ParseCards("3"))));
  CHECK(agent.scripted_moves() == 1);
}

TEST_CASE("agent specs") {
  CHECK(ParseAgentSpec("rhcp").kind == AgentKind::kRhcp);
  CHECK(ParseAgentSpec("random").kind == AgentKind::kRandom);
  const AgentSpec cql = ParseAgentSpec("cql:/tmp/x.bin");
  CHECK(cql.kind == AgentKind::kCql);
  CHECK(cql.path == "/tmp/x.bin");
  CHECK(ToString(cql) == "cql:/tmp/x.bin");
  CHECK_THROWS_AS(ParseAgentSpec("cql"), std::invalid_argument);
  CHECK_THROWS_AS(ParseAgentSpec("rhcp:x"), std::invalid_argument);
  CHECK_THROWS_AS(ParseAgentSpec("minimax"), std::invalid_argument);
}

TEST_CASE("match reports are consistent and deterministic") {
  MatchOptions options;
  options.episodes = 100;
  options.seed = 5;
  const MatchReport a = RunMatch(All(ParseAgentSpec("rhcp")), options);
  CHECK(a.landlord_winrate + a.peasant_winrate == 1.0);
  CHECK(a.landlord_winrate >= 0.0);
  CHECK(a.landlord_winrate <= 1.0);
  CHECK(a.agents[0] == "rhcp");
  const MatchReport b = RunMatch(All(ParseAgentSpec("rhcp")), options);
  CHECK(a.landlord_by_repeat == b.landlord_by_repeat);
  CHECK(a.seeds == b.seeds);

  options.repeats = 3;
  options.episodes = 40;
  const MatchReport one = RunMatch(All(ParseAgentSpec("random")), options);
  options.threads = 3;
  const MatchReport three = RunMatch(All(ParseAgentSpec("random")), options);
  CHECK(one.landlord_by_repeat == three.landlord_by_repeat);
  CHECK(one.seeds.size() == 3);
  CHECK(one.stddev >= 0.0);
  CHECK(ToJson(one)["repeats"] == 3);
}

TEST_CASE("all-random matches let both teams win") {
  MatchOptions options;
  options.episodes = 1000;
  const MatchReport r = RunMatch(All(ParseAgentSpec("random")), options);
  CHECK(r.landlord_winrate > 0.0);
  CHECK(r.peasant_winrate > 0.0);
}

TEST_CASE("winrate grid: rhcp beats random in every seat") {
  MatchOptions options;
  options.episodes = 100;
  options.repeats = 2;
  const WinrateGrid grid = WinrateMatrix({ParseAgentSpec("random"), ParseAgentSpec("rhcp")},
                                         {ParseAgentSpec("random"), ParseAgentSpec("rhcp")},
                                         options);
  REQUIRE(grid.cells.size() == 2);
  for (Seat seat : kAllSeats) {
    CHECK(grid.cells[0][SeatIndex(seat)].size() == 2);
    CHECK(grid.cells[1][SeatIndex(seat)][0].mean > grid.cells[0][SeatIndex(seat)][0].mean);
  }
  const std::string text = ToText(grid);
  CHECK(text.find("rhcp as Landlord") != std::string::npos);
  CHECK(ToJson(grid)["rows"].size() == 6);
}

TEST_CASE("cql checkpoint completes a grid") {
  GroupAutoencoder encoder;
  CqlConfig config;
  config.fc1_widths = {16};
  config.head_widths = {16};
  CqlLearner learner(std::make_shared<LatentTable>(encoder), config);
  const auto path = (std::filesystem::temp_directory_path() / "ddz_arena_cql.bin").string();
  SaveCheckpoint(path, encoder, learner);
  MatchOptions options;
  options.episodes = 10;
  const WinrateGrid grid = WinrateMatrix(
      {ParseAgentSpec("cql:" + path)}, {ParseAgentSpec("random"), ParseAgentSpec("rhcp")},
      options);
  CHECK(grid.cells[0][0].size() == 2);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

TEST_CASE("scripted record agents replay a recorded game") {
  const GameRecord record = LoadRecordFile(DDZ_TEST_DATA_DIR "/human_player1.txt");
  const AgentFactory factory = MakeAgentFactory(ParseAgentSpec(
      std::string("scripted:") + DDZ_TEST_DATA_DIR + "/human_player1.txt"));
  std::array<std::unique_ptr<Agent>, kNumSeats> owned;
  SeatAgents agents{};
  for (Seat s : kAllSeats) {
    owned[SeatIndex(s)] = factory(s);
    agents[SeatIndex(s)] = owned[SeatIndex(s)].get();
  }
  std::mt19937_64 rng(0);
  const GameState end = PlayGame(agents, GameState::FromHands(record.initial_hands), rng);
  CHECK(end.winner() == Seat::kLandlord);
  CHECK(ExportRecord(end).rows.size() == record.rows.size());
}

TEST_CASE("no agent kind plays an illegal move") {
  const std::vector<std::unique_ptr<Agent>> pool = [] {
    std::vector<std::unique_ptr<Agent>> v;
    v.push_back(std::make_unique<RandomAgent>());
    v.push_back(std::make_unique<RhcpAgent>());
    v.push_back(std::make_unique<ScriptedAgent>());
    return v;
  }();
  std::mt19937_64 rng(3);
  int turns = 0;
  while (turns < 3000) {
    GameState state = GameState::Deal(rng);
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    SeatAgents agents = {pool[pick(rng)].get(), pool[pick(rng)].get(), pool[pick(rng)].get()};
    while (!state.IsTerminal()) {
      const Seat seat = state.to_act();
      const Move move = agents[SeatIndex(seat)]->Act(state.Observe(seat), rng);
      REQUIRE(state.IsLegal(move));
      state = state.Apply(move);
      CardMultiset total;
      for (Seat s : kAllSeats) total = total + state.hand(s);
      for (const HistoryEntry& h : state.history()) total = total + h.move.cards();
      REQUIRE(total == CardMultiset::FullDeck());
      ++turns;
    }
  }
}

TEST_CASE("config parsing") {
  const RunConfig c = ParseConfig(
      "# toy run\n"
      "batch_size = 16\n"
      "fc1_widths=64,64\n"
      "pass_penalty=2.5\n"
      "memoize=false\n"
      "learning_seats = landlord, peasant up\n"
      "opponent=random\n"
      "autoencoder_channels=4\n"
      "seed=9\n");
  CHECK(c.training.batch_size == 16);
  CHECK(c.training.seed == 9);
  CHECK(c.cql.seed == 9);
  CHECK(c.cql.fc1_widths == std::vector<int>{64, 64});
  CHECK(c.rhcp.pass_penalty == Score::FromHalves(5));
  CHECK_FALSE(c.rhcp.memoize);
  CHECK(c.learning_seats == std::vector<Seat>{Seat::kLandlord, Seat::kPeasantUp});
  CHECK(c.opponent == "random");
  CHECK(c.autoencoder.channels == 4);
  CHECK(c.training.memory == 3000);

  CHECK_THROWS_AS(ParseConfig("bogus=1"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("batch_size=0"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("batch_size=abc"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("pass_penalty=0.3"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("just text"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("learning_seats=dealer"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("opponent=cql"), ConfigError);
  CHECK_THROWS_AS(LoadConfigFile("/nonexistent/ddz.cfg"), ConfigError);

  const auto path = (std::filesystem::temp_directory_path() / "ddz_test.cfg").string();
  std::ofstream(path) << "epochs=3\n";
  CHECK(LoadConfigFile(path).training.epochs == 3);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace ddz
