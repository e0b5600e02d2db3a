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

#ifndef DDZ_ARENA_H_
#define DDZ_ARENA_H_

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddz/agent.h"
#include "ddz/cql.h"
#include "ddz/features.h"
#include "ddz/rhcp.h"
#include "json.hpp"

namespace ddz {

enum class AgentKind { kRandom, kRhcp, kCql, kScripted };

struct AgentSpec {
  AgentKind kind = AgentKind::kRandom;
  // Checkpoint for kCql, record file for kScripted.
  std::string path;
  RhcpConfig rhcp;
};

// "random", "rhcp", "cql:<checkpoint>" or "scripted:<record-file>".
// Throws std::invalid_argument.
AgentSpec ParseAgentSpec(std::string_view text);
std::string ToString(const AgentSpec& spec);

using AgentFactory = std::function<std::unique_ptr<Agent>(Seat)>;

// A CQL checkpoint is loaded once and shared by every agent the factory
// makes. A scripted agent plays its seat's moves from the record.
AgentFactory MakeAgentFactory(const AgentSpec& spec);

struct MatchOptions {
  int episodes = 100;
  int repeats = 1;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct MatchReport {
  std::array<std::string, kNumSeats> agents;
  int episodes = 0;
  int repeats = 0;
  std::vector<std::uint64_t> seeds;  // One per repeat.
  std::vector<double> landlord_by_repeat;
  double landlord_winrate = 0;
  double peasant_winrate = 0;
  // Sample standard deviation of the landlord winrate across repeats.
  double stddev = 0;

  // Winrate of the team `seat` plays for.
  double SeatWinrate(Seat seat) const {
    return seat == Seat::kLandlord ? landlord_winrate : peasant_winrate;
  }
};

// Plays `repeats` x `episodes` games. Repeat r uses seed
// EpisodeSeed(options.seed, r) and episode e of it EpisodeSeed(that, e), so
// reports do not depend on the thread count. Each thread builds its own
// agents. Illegal moves propagate as IllegalMoveError.
MatchReport RunMatch(const std::array<AgentFactory, kNumSeats>& seats,
                     const MatchOptions& options);
nlohmann::json ToJson(const MatchReport& report);

// Each agent plays each seat against each environment kind filling the
// other two seats.
struct WinrateGrid {
  std::vector<std::string> agents;
  std::vector<std::string> environments;
  struct Cell {
    double mean = 0;
    double stddev = 0;
  };
  // cells[agent][seat][environment].
  std::vector<std::array<std::vector<Cell>, kNumSeats>> cells;
};

WinrateGrid WinrateMatrix(const std::vector<AgentSpec>& agents,
                          const std::vector<AgentSpec>& environments,
                          const MatchOptions& options);
std::string ToText(const WinrateGrid& grid);
nlohmann::json ToJson(const WinrateGrid& grid);

// Everything a run can be configured with.
struct RunConfig {
  TrainingConfig training;
  CqlConfig cql;
  RhcpConfig rhcp;
  AutoencoderConfig autoencoder;
  std::vector<Seat> learning_seats = {Seat::kLandlord};
  std::string opponent = "rhcp";
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flat key=value lines; blank lines and '#' comments are ignored. Keys are
// the field names of TrainingConfig and CqlConfig, "pass_penalty",
// "max_cache_entries" and "memoize" for RHCP, "autoencoder_<field>" for the
// auto-encoder, plus "learning_seats" and "opponent". Throws ConfigError on
// an unknown key or a bad value.
RunConfig ParseConfig(std::string_view text, RunConfig base = {});
RunConfig LoadConfigFile(const std::string& path, RunConfig base = {});

}  // namespace ddz

#endif  // DDZ_ARENA_H_
