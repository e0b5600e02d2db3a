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

#include "ddz/cli.h"

#include <cctype>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ddz/arena.h"
#include "ddz/cql.h"
#include "ddz/decomp.h"
#include "ddz/record.h"
#include "ddz/service.h"

namespace ddz {
namespace {

using nlohmann::json;

// Thrown for bad flag values found after parsing.
class FlagError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

RunConfig LoadRunConfig(const std::string& path) {
  return path.empty() ? RunConfig{} : LoadConfigFile(path);
}

AgentSpec ResolveSpec(const std::string& text, const std::string& checkpoint,
                      const RhcpConfig& rhcp) {
  AgentSpec spec;
  if (text == "cql") {
    if (checkpoint.empty()) throw FlagError("agent 'cql' needs --checkpoint");
    spec.kind = AgentKind::kCql;
    spec.path = checkpoint;
  } else {
    try {
      spec = ParseAgentSpec(text);
    } catch (const std::invalid_argument& e) {
      throw FlagError(e.what());
    }
  }
  spec.rhcp = rhcp;
  return spec;
}

struct PlayFlags {
  std::vector<std::string> agents = {"random", "rhcp"};
  std::vector<std::string> environments;
  std::string landlord, down, up;
  int episodes = 100;
  int repeats = 10;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string checkpoint, config, format = "text", out;
};

int Play(const PlayFlags& f, std::ostream& out) {
  const RunConfig config = LoadRunConfig(f.config);
  MatchOptions options;
  options.episodes = f.episodes;
  options.repeats = f.repeats;
  options.seed = f.seed;
  options.threads = f.threads;
  Output sink(f.out, out);
  if (!f.landlord.empty() || !f.down.empty() || !f.up.empty()) {
    std::array<AgentFactory, kNumSeats> seats;
    const std::array<std::string, kNumSeats> names = {f.landlord, f.down, f.up};
    for (Seat s : kAllSeats) {
      const std::string& name = names[SeatIndex(s)].empty() ? "rhcp" : names[SeatIndex(s)];
      seats[SeatIndex(s)] = MakeAgentFactory(ResolveSpec(name, f.checkpoint, config.rhcp));
    }
    const MatchReport report = RunMatch(seats, options);
    if (f.format == "json") {
      *sink << ToJson(report).dump(2) << "\n";
    } else {
      *sink << std::fixed << std::setprecision(3);
      for (Seat s : kAllSeats) *sink << SeatName(s) << ": " << report.agents[SeatIndex(s)] << "\n";
      *sink << "episodes " << report.episodes << " x " << report.repeats << "\n"
            << "landlord winrate " << report.landlord_winrate << " (sd " << report.stddev
            << ")\n"
            << "peasant winrate " << report.peasant_winrate << "\n";
    }
    return kExitOk;
  }
  std::vector<AgentSpec> agents, environments;
  for (const std::string& a : f.agents) agents.push_back(ResolveSpec(a, f.checkpoint, config.rhcp));
  for (const std::string& e : f.environments.empty() ? f.agents : f.environments) {
    environments.push_back(ResolveSpec(e, f.checkpoint, config.rhcp));
  }
  const WinrateGrid grid = WinrateMatrix(agents, environments, options);
  if (f.format == "json") {
    *sink << ToJson(grid).dump(2) << "\n";
  } else {
    *sink << ToText(grid);
  }
  return kExitOk;
}

struct TrainFlags {
  std::string config, checkpoint = "cql.bin", out, encoder;
  std::optional<int> epochs, episodes;
  std::optional<std::uint64_t> seed;
};

json EpochJson(const EpochRecord& r, const std::vector<Seat>& seats) {
  json winrates = json::object();
  for (size_t i = 0; i < seats.size(); ++i) {
    winrates[std::string(SeatName(seats[i]))] = r.winrates[i];
  }
  return {{"epoch", r.epoch},         {"env_steps", r.env_steps}, {"train_steps", r.train_steps},
          {"epsilon", r.epsilon},     {"loss", r.loss},           {"winrates", winrates},
          {"eval_episodes", r.eval_episodes}, {"seconds", r.seconds}};
}

std::string CheckpointPath(const std::string& base, Seat seat, size_t learners) {
  if (learners == 1) return base;
  std::string key(SeatName(seat));
  for (char& c : key) c = c == ' ' ? '_' : static_cast<char>(std::tolower(c));
  return base + "." + key;
}

int Train(const TrainFlags& f, std::ostream& out, std::ostream& err) {
  RunConfig config = LoadRunConfig(f.config);
  if (f.epochs) {
    if (*f.epochs < 1) throw FlagError("--epochs must be positive");
    config.training.epochs = *f.epochs;
    config.training.epsilon_anneal_epochs =
        std::min(config.training.epsilon_anneal_epochs, *f.epochs);
  }
  if (f.episodes) config.training.final_eval_episodes = *f.episodes;
  if (f.seed) {
    config.training.seed = *f.seed;
    config.cql.seed = *f.seed;
  }
  AgentSpec opponent_spec = ResolveSpec(config.opponent, "", config.rhcp);
  const AgentFactory opponents = MakeAgentFactory(opponent_spec);

  const auto start = std::chrono::steady_clock::now();
  GroupAutoencoder encoder(config.autoencoder);
  if (!f.encoder.empty()) {
    encoder.Load(f.encoder);
    err << "loaded encoder " << f.encoder << "\n";
  } else {
    const PretrainReport report = encoder.Pretrain();
    err << "autoencoder: " << report.epochs << " epochs, reconstruction " << report.accuracy
        << "\n";
  }
  const auto latents = std::make_shared<const LatentTable>(encoder);
  std::vector<std::unique_ptr<CqlLearner>> learners;
  for (size_t i = 0; i < config.learning_seats.size(); ++i) {
    CqlConfig c = config.cql;
    c.seed += i;
    learners.push_back(std::make_unique<CqlLearner>(latents, c, config.training));
  }

  Output sink(f.out, out);
  const std::vector<Seat>& seats = config.learning_seats;
  const TrainingResult result = TrainCql(seats, opponents, learners, [&](const EpochRecord& r) {
    *sink << EpochJson(r, seats).dump() << "\n";
    (*sink).flush();
    err << "epoch " << r.epoch << " loss " << r.loss << " epsilon " << r.epsilon;
    for (size_t i = 0; i < seats.size(); ++i) err << " " << SeatName(seats[i]) << " " << r.winrates[i];
    err << "\n";
  });

  json final_line = {{"final", true}, {"episodes", result.final_episodes}};
  json winrates = json::object(), baseline = json::object(), checkpoints = json::object();
  for (size_t i = 0; i < seats.size(); ++i) {
    const std::string name(SeatName(seats[i]));
    winrates[name] = result.final_winrates[i];
    RandomAgent random;
    baseline[name] = EvaluateSeat(random, seats[i], opponents, result.final_episodes,
                                  FinalEvalSeed(config.training));
    const std::string path = CheckpointPath(f.checkpoint, seats[i], seats.size());
    SaveCheckpoint(path, encoder, *learners[i]);
    checkpoints[name] = path;
  }
  final_line["winrates"] = winrates;
  final_line["random_baseline"] = baseline;
  final_line["checkpoints"] = checkpoints;
  final_line["seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  *sink << final_line.dump() << "\n";
  return kExitOk;
}

struct ServeFlags {
  std::string host = "127.0.0.1", data_dir = "data", checkpoint, static_dir = "webui/dist", config;
  int port = 8080;
};

int Serve(const ServeFlags& f, std::ostream& out) {
  ServiceOptions options;
  options.data_dir = f.data_dir;
  options.checkpoint = f.checkpoint;
  options.rhcp = LoadRunConfig(f.config).rhcp;
  GameService service(options);
  HttpServer server(service, f.static_dir);
  const int port = server.Bind(f.host, f.port);
  if (port < 0) throw std::runtime_error("cannot bind " + f.host + ":" + std::to_string(f.port));
  out << "listening on http://" << f.host << ":" << port << "\n";
  out.flush();
  return server.ListenAfterBind() ? kExitOk : kExitFailure;
}

struct ReplayFlags {
  std::string record, format = "text", out;
  int decompositions = 0;
};

int Replay(const ReplayFlags& f, std::ostream& out, std::ostream& err) {
  GameRecord record;
  std::optional<GameState> end;
  try {
    record = LoadRecordFile(f.record);
    end.emplace(ReplayRecord(record));
  } catch (const RecordError& e) {
    err << "invalid record " << f.record;
    if (e.round() > 0) err << " at round " << e.round();
    err << ": " << e.what() << "\n";
    return kExitBadRecord;
  }
  Output sink(f.out, out);
  if (f.format == "json") {
    *sink << RecordToJson(record).dump(2) << "\n";
    return kExitOk;
  }
  std::mt19937_64 rng(1);
  for (const RecordRow& row : record.rows) {
    *sink << "round " << row.round << " " << SeatName(row.seat) << " [" << FormatCards(row.hand)
          << "] plays " << (row.move.IsPass() ? "Pass" : FormatCards(row.move.cards())) << "\n";
    if (f.decompositions > 0) {
      const DecompositionSample sample = SampleDecompositions(row.hand, f.decompositions, rng);
      for (const Decomposition& d : sample.decompositions) *sink << "    " << ToString(d) << "\n";
      if (sample.truncated) *sink << "    (sampled)\n";
    }
  }
  *sink << "winner " << SeatName(*end->winner()) << "\n";
  return kExitOk;
}

struct EnumerateFlags {
  std::string format = "text", out;
};

int Enumerate(const EnumerateFlags& f, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const ActionCatalog catalog = EnumerateAllMoves();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto counts = catalog.CategoryCounts();
  Output sink(f.out, out);
  if (f.format == "json") {
    json categories = json::object();
    for (int c = 1; c < kNumCategories; ++c) {
      categories[std::string(CategoryName(static_cast<Category>(c)))] = counts[c];
    }
    *sink << json{{"categories", categories}, {"pass", 1}, {"total", catalog.size()},
                  {"seconds", seconds}}
                 .dump(2)
          << "\n";
    return kExitOk;
  }
  for (int c = 1; c < kNumCategories; ++c) {
    *sink << std::left << std::setw(32) << CategoryName(static_cast<Category>(c)) << counts[c]
          << "\n";
  }
  *sink << std::left << std::setw(32) << "Pass" << 1 << "\n";
  *sink << std::left << std::setw(32) << "total" << catalog.size() << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dou Di Zhu engine and agent workbench", "ddz"};
  app.require_subcommand(1);
  const auto formats = CLI::IsMember({"text", "json"});

  PlayFlags play;
  CLI::App* play_cmd = app.add_subcommand("play", "Run a match or a winrate grid");
  play_cmd->add_option("--agents", play.agents, "Agent specs for the grid rows")->delimiter(',');
  play_cmd->add_option("--environments", play.environments, "Agent specs filling the other seats")
      ->delimiter(',');
  play_cmd->add_option("--landlord", play.landlord, "Single match: Landlord agent");
  play_cmd->add_option("--down", play.down, "Single match: Peasant Down agent");
  play_cmd->add_option("--up", play.up, "Single match: Peasant Up agent");
  play_cmd->add_option("--episodes", play.episodes)->check(CLI::PositiveNumber);
  play_cmd->add_option("--repeats", play.repeats)->check(CLI::PositiveNumber);
  play_cmd->add_option("--seed", play.seed);
  play_cmd->add_option("--threads", play.threads)->check(CLI::PositiveNumber);
  play_cmd->add_option("--checkpoint", play.checkpoint, "Checkpoint used by agent 'cql'");
  play_cmd->add_option("--config", play.config, "key=value file (RHCP settings)");
  play_cmd->add_option("--format", play.format)->check(formats);
  play_cmd->add_option("--out", play.out);

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train CQL agents; writes a JSONL curve");
  train_cmd->add_option("--config", train.config, "key=value file");
  train_cmd->add_option("--epochs", train.epochs);
  train_cmd->add_option("--episodes", train.episodes, "Final evaluation episodes")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--seed", train.seed);
  train_cmd->add_option("--checkpoint", train.checkpoint, "Output checkpoint path");
  train_cmd->add_option("--encoder", train.encoder, "Use a saved encoder instead of pretraining");
  train_cmd->add_option("--out", train.out, "Curve file (JSON lines)");

  ServeFlags serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the game service");
  serve_cmd->add_option("--host", serve.host);
  serve_cmd->add_option("--port", serve.port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--data-dir", serve.data_dir);
  serve_cmd->add_option("--checkpoint", serve.checkpoint, "Checkpoint for seats set to 'cql'");
  serve_cmd->add_option("--static-dir", serve.static_dir);
  serve_cmd->add_option("--config", serve.config, "key=value file (RHCP settings)");

  ReplayFlags replay;
  CLI::App* replay_cmd = app.add_subcommand("replay", "Validate and print a game record");
  replay_cmd->add_option("record-file", replay.record)->required();
  replay_cmd->add_option("--decompositions", replay.decompositions,
                         "Print up to N decompositions of each hand")
      ->check(CLI::NonNegativeNumber);
  replay_cmd->add_option("--format", replay.format)->check(formats);
  replay_cmd->add_option("--out", replay.out);

  EnumerateFlags enumerate;
  CLI::App* enumerate_cmd = app.add_subcommand("enumerate", "Count the action catalog");
  enumerate_cmd->add_option("--format", enumerate.format)->check(formats);
  enumerate_cmd->add_option("--out", enumerate.out);

  std::vector<const char*> argv = {"ddz"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidFlags;
  }

  try {
    if (play_cmd->parsed()) return Play(play, out);
    if (train_cmd->parsed()) return Train(train, out, err);
    if (serve_cmd->parsed()) return Serve(serve, out);
    if (replay_cmd->parsed()) return Replay(replay, out, err);
    if (enumerate_cmd->parsed()) return Enumerate(enumerate, out);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidFlags;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidFlags;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitInvalidFlags;
}

}  // namespace ddz
