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

#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "ddz/record.h"

namespace ddz {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitList(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(Trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return out;
}

int ParsePositive(std::string_view key, std::string_view value) {
  const int v = ParseNumber<int>(key, value);
  if (v < 1) throw ConfigError(std::string(key) + " must be positive");
  return v;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
}

std::vector<int> ParseWidths(std::string_view key, std::string_view value) {
  std::vector<int> out;
  for (std::string_view item : SplitList(value)) out.push_back(ParsePositive(key, item));
  if (out.empty()) throw ConfigError(std::string(key) + " is empty");
  return out;
}

// Scores are multiples of one half.
Score ParseScore(std::string_view key, std::string_view value) {
  const double v = ParseNumber<double>(key, value);
  const double halves = v * 2.0;
  if (halves != std::floor(halves)) {
    throw ConfigError(std::string(key) + " must be a multiple of 0.5");
  }
  return Score::FromHalves(static_cast<std::int64_t>(halves));
}

std::vector<Move> SeatMoves(const GameRecord& record, Seat seat) {
  std::vector<Move> out;
  for (const RecordRow& row : record.rows) {
    if (row.seat == seat) out.push_back(row.move);
  }
  return out;
}

double Mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double SampleStddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

// Owns a loaded checkpoint shared by the agents built from it.
class CheckpointAgent : public Agent {
 public:
  explicit CheckpointAgent(std::shared_ptr<LoadedCheckpoint> checkpoint)
      : checkpoint_(std::move(checkpoint)), agent_(checkpoint_->learner.get(), false, 0.0) {}
  Move Act(const Observation& obs, std::mt19937_64& rng) override {
    return agent_.Act(obs, rng);
  }
  std::string name() const override { return "cql"; }

 private:
  std::shared_ptr<LoadedCheckpoint> checkpoint_;
  CqlAgent agent_;
};

}  // namespace

AgentSpec ParseAgentSpec(std::string_view text) {
  AgentSpec spec;
  const auto colon = text.find(':');
  const std::string_view kind = Trim(text.substr(0, colon));
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view() : Trim(text.substr(colon + 1));
  if (kind == "random") {
    spec.kind = AgentKind::kRandom;
  } else if (kind == "rhcp") {
    spec.kind = AgentKind::kRhcp;
  } else if (kind == "cql") {
    spec.kind = AgentKind::kCql;
  } else if (kind == "scripted") {
    spec.kind = AgentKind::kScripted;
  } else {
    throw std::invalid_argument("unknown agent kind '" + std::string(kind) + "'");
  }
  const bool needs_path = spec.kind == AgentKind::kCql || spec.kind == AgentKind::kScripted;
  if (needs_path && arg.empty()) {
    throw std::invalid_argument(std::string(kind) + " needs a path, e.g. " +
                                std::string(kind) + ":<file>");
  }
  if (!needs_path && !arg.empty()) {
    throw std::invalid_argument(std::string(kind) + " takes no argument");
  }
  spec.path = std::string(arg);
  return spec;
}

std::string ToString(const AgentSpec& spec) {
  switch (spec.kind) {
    case AgentKind::kRandom:
      return "random";
    case AgentKind::kRhcp:
      return "rhcp";
    case AgentKind::kCql:
      return "cql:" + spec.path;
    case AgentKind::kScripted:
      return "scripted:" + spec.path;
  }
  return "?";
}

AgentFactory MakeAgentFactory(const AgentSpec& spec) {
  switch (spec.kind) {
    case AgentKind::kRandom:
      return [](Seat) { return std::make_unique<RandomAgent>(); };
    case AgentKind::kRhcp:
      return [cfg = spec.rhcp](Seat) { return std::make_unique<RhcpAgent>(cfg); };
    case AgentKind::kCql: {
      auto checkpoint = std::make_shared<LoadedCheckpoint>(LoadCheckpoint(spec.path));
      return [checkpoint](Seat) { return std::make_unique<CheckpointAgent>(checkpoint); };
    }
    case AgentKind::kScripted: {
      auto record = std::make_shared<GameRecord>(LoadRecordFile(spec.path));
      return [record](Seat seat) {
        return std::make_unique<ScriptedAgent>(SeatMoves(*record, seat));
      };
    }
  }
  throw std::invalid_argument("unknown agent kind");
}

MatchReport RunMatch(const std::array<AgentFactory, kNumSeats>& seats,
                     const MatchOptions& options) {
  if (options.episodes < 1 || options.repeats < 1 || options.threads < 1) {
    throw std::invalid_argument("episodes, repeats and threads must be positive");
  }
  MatchReport report;
  report.episodes = options.episodes;
  report.repeats = options.repeats;
  const int total = options.episodes * options.repeats;
  std::vector<char> landlord_won(total, 0);
  for (int r = 0; r < options.repeats; ++r) report.seeds.push_back(EpisodeSeed(options.seed, r));

  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&](int thread_index, std::array<std::string, kNumSeats>* names) {
    try {
      std::array<std::unique_ptr<Agent>, kNumSeats> owned;
      SeatAgents agents{};
      for (Seat s : kAllSeats) {
        owned[SeatIndex(s)] = seats[SeatIndex(s)](s);
        agents[SeatIndex(s)] = owned[SeatIndex(s)].get();
        if (names) (*names)[SeatIndex(s)] = owned[SeatIndex(s)]->name();
      }
      for (int i = thread_index; i < total; i += options.threads) {
        const int repeat = i / options.episodes;
        std::mt19937_64 rng(EpisodeSeed(report.seeds[repeat], i % options.episodes));
        const GameState end = PlayGame(agents, GameState::Deal(rng), rng);
        landlord_won[i] = *end.winner() == Seat::kLandlord;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };
  if (options.threads == 1) {
    worker(0, &report.agents);
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < options.threads; ++t) {
      threads.emplace_back(worker, t, t == 0 ? &report.agents : nullptr);
    }
    for (std::thread& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (int r = 0; r < options.repeats; ++r) {
    int wins = 0;
    for (int e = 0; e < options.episodes; ++e) wins += landlord_won[r * options.episodes + e];
    report.landlord_by_repeat.push_back(static_cast<double>(wins) / options.episodes);
  }
  report.landlord_winrate = Mean(report.landlord_by_repeat);
  report.peasant_winrate = 1.0 - report.landlord_winrate;
  report.stddev = SampleStddev(report.landlord_by_repeat);
  return report;
}

nlohmann::json ToJson(const MatchReport& report) {
  nlohmann::json j;
  nlohmann::json agents = nlohmann::json::object();
  for (Seat s : kAllSeats) agents[std::string(SeatName(s))] = report.agents[SeatIndex(s)];
  j["agents"] = agents;
  j["episodes"] = report.episodes;
  j["repeats"] = report.repeats;
  j["seeds"] = report.seeds;
  j["landlord_winrate"] = report.landlord_winrate;
  j["peasant_winrate"] = report.peasant_winrate;
  j["landlord_by_repeat"] = report.landlord_by_repeat;
  j["stddev"] = report.stddev;
  return j;
}

WinrateGrid WinrateMatrix(const std::vector<AgentSpec>& agents,
                          const std::vector<AgentSpec>& environments,
                          const MatchOptions& options) {
  WinrateGrid grid;
  std::vector<AgentFactory> env_factories;
  for (const AgentSpec& e : environments) {
    grid.environments.push_back(ToString(e));
    env_factories.push_back(MakeAgentFactory(e));
  }
  for (const AgentSpec& a : agents) {
    grid.agents.push_back(ToString(a));
    const AgentFactory factory = MakeAgentFactory(a);
    std::array<std::vector<WinrateGrid::Cell>, kNumSeats> rows;
    for (Seat seat : kAllSeats) {
      for (const AgentFactory& env : env_factories) {
        std::array<AgentFactory, kNumSeats> seats;
        for (Seat s : kAllSeats) seats[SeatIndex(s)] = s == seat ? factory : env;
        const MatchReport report = RunMatch(seats, options);
        rows[SeatIndex(seat)].push_back({report.SeatWinrate(seat), report.stddev});
      }
    }
    grid.cells.push_back(std::move(rows));
  }
  return grid;
}

std::string ToText(const WinrateGrid& grid) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  for (size_t a = 0; a < grid.agents.size(); ++a) {
    for (Seat seat : kAllSeats) {
      out << grid.agents[a] << " as " << SeatName(seat) << ":";
      for (size_t e = 0; e < grid.environments.size(); ++e) {
        const auto& cell = grid.cells[a][SeatIndex(seat)][e];
        out << "  vs " << grid.environments[e] << " " << cell.mean << " (sd " << cell.stddev
            << ")";
      }
      out << "\n";
    }
  }
  return out.str();
}

nlohmann::json ToJson(const WinrateGrid& grid) {
  nlohmann::json j;
  j["agents"] = grid.agents;
  j["environments"] = grid.environments;
  nlohmann::json rows = nlohmann::json::array();
  for (size_t a = 0; a < grid.agents.size(); ++a) {
    for (Seat seat : kAllSeats) {
      nlohmann::json row;
      row["agent"] = grid.agents[a];
      row["seat"] = SeatName(seat);
      nlohmann::json cells = nlohmann::json::array();
      for (const auto& cell : grid.cells[a][SeatIndex(seat)]) {
        cells.push_back({{"winrate", cell.mean}, {"stddev", cell.stddev}});
      }
      row["cells"] = cells;
      rows.push_back(row);
    }
  }
  j["rows"] = rows;
  return j;
}

RunConfig ParseConfig(std::string_view text, RunConfig c) {
  using Setter = std::function<void(std::string_view, std::string_view)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"batch_size", [&](auto k, auto v) { c.training.batch_size = ParsePositive(k, v); }},
      {"steps_per_epoch",
       [&](auto k, auto v) { c.training.steps_per_epoch = ParsePositive(k, v); }},
      {"update_frequency",
       [&](auto k, auto v) { c.training.update_frequency = ParsePositive(k, v); }},
      {"memory", [&](auto k, auto v) { c.training.memory = ParsePositive(k, v); }},
      {"epochs", [&](auto k, auto v) { c.training.epochs = ParseNumber<int>(k, v); }},
      {"epsilon_start",
       [&](auto k, auto v) { c.training.epsilon_start = ParseNumber<double>(k, v); }},
      {"epsilon_end", [&](auto k, auto v) { c.training.epsilon_end = ParseNumber<double>(k, v); }},
      {"epsilon_anneal_epochs",
       [&](auto k, auto v) { c.training.epsilon_anneal_epochs = ParseNumber<int>(k, v); }},
      {"target_sync_period",
       [&](auto k, auto v) { c.training.target_sync_period = ParsePositive(k, v); }},
      {"eval_episodes",
       [&](auto k, auto v) { c.training.eval_episodes = ParseNumber<int>(k, v); }},
      {"final_eval_episodes",
       [&](auto k, auto v) { c.training.final_eval_episodes = ParseNumber<int>(k, v); }},
      {"seed", [&](auto k, auto v) { c.training.seed = c.cql.seed = ParseNumber<std::uint64_t>(k, v); }},
      {"fc1_widths", [&](auto k, auto v) { c.cql.fc1_widths = ParseWidths(k, v); }},
      {"head_widths", [&](auto k, auto v) { c.cql.head_widths = ParseWidths(k, v); }},
      {"sampling_limit", [&](auto k, auto v) { c.cql.sampling_limit = ParsePositive(k, v); }},
      {"gamma", [&](auto k, auto v) { c.cql.gamma = ParseNumber<double>(k, v); }},
      {"learning_rate", [&](auto k, auto v) { c.cql.learning_rate = ParseNumber<double>(k, v); }},
      {"pass_penalty", [&](auto k, auto v) { c.rhcp.pass_penalty = ParseScore(k, v); }},
      {"max_cache_entries",
       [&](auto k, auto v) { c.rhcp.max_cache_entries = ParseNumber<std::size_t>(k, v); }},
      {"memoize", [&](auto k, auto v) { c.rhcp.memoize = ParseBool(k, v); }},
      {"autoencoder_channels",
       [&](auto k, auto v) { c.autoencoder.channels = ParsePositive(k, v); }},
      {"autoencoder_latent", [&](auto k, auto v) { c.autoencoder.latent = ParsePositive(k, v); }},
      {"autoencoder_max_epochs",
       [&](auto k, auto v) { c.autoencoder.max_epochs = ParsePositive(k, v); }},
      {"autoencoder_batch_size",
       [&](auto k, auto v) { c.autoencoder.batch_size = ParsePositive(k, v); }},
      {"autoencoder_learning_rate",
       [&](auto k, auto v) { c.autoencoder.learning_rate = ParseNumber<double>(k, v); }},
      {"autoencoder_stop_accuracy",
       [&](auto k, auto v) { c.autoencoder.stop_accuracy = ParseNumber<double>(k, v); }},
      {"autoencoder_target_accuracy",
       [&](auto k, auto v) { c.autoencoder.target_accuracy = ParseNumber<double>(k, v); }},
      {"autoencoder_seed",
       [&](auto k, auto v) { c.autoencoder.seed = ParseNumber<std::uint64_t>(k, v); }},
      {"learning_seats",
       [&](auto k, auto v) {
         c.learning_seats.clear();
         for (std::string_view name : SplitList(v)) {
           const auto seat = SeatFromName(name);
           if (!seat) throw ConfigError("bad seat in " + std::string(k) + ": " + std::string(name));
           c.learning_seats.push_back(*seat);
         }
         if (c.learning_seats.empty()) throw ConfigError("learning_seats is empty");
       }},
      {"opponent",
       [&](auto k, auto v) {
         try {
           ParseAgentSpec(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(std::string(k) + ": " + e.what());
         }
         c.opponent = std::string(v);
       }},
  };

  int line_number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_number) + ": expected key=value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("line " + std::to_string(line_number) + ": unknown key '" +
                        std::string(key) + "'");
    }
    it->second(key, value);
  }
  return c;
}

RunConfig LoadConfigFile(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str(), std::move(base));
}

}  // namespace ddz
