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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddz/cql.h"
#include "ddz/record.h"
#include "doctest.h"
#include "json.hpp"

namespace ddz {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int code;
  std::string out, err;
};

Run Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path Temp(const std::string& name) { return fs::temp_directory_path() / ("ddz_cli_" + name); }

const std::string kRecord = DDZ_TEST_DATA_DIR "/human_player1.txt";

TEST_CASE("enumerate prints category counts and the total") {
  const Run r = Cli({"enumerate"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("SequentialTriosSeriesTakeOne") != std::string::npos);
  CHECK(r.out.find("total                           13527") != std::string::npos);
  const Run j = Cli({"enumerate", "--format", "json"});
  const json counts = json::parse(j.out);
  int sum = counts["pass"];
  for (const auto& [name, n] : counts["categories"].items()) sum += n.get<int>();
  CHECK(sum == 13527);
  CHECK(counts["total"] == 13527);
}

TEST_CASE("invalid flags exit with 2") {
  CHECK(Cli({}).code == kExitInvalidFlags);
  CHECK(Cli({"dance"}).code == kExitInvalidFlags);
  CHECK(Cli({"play", "--episodes", "zero"}).code == kExitInvalidFlags);
  CHECK(Cli({"play", "--episodes", "0"}).code == kExitInvalidFlags);
  CHECK(Cli({"play", "--agents", "minimax"}).code == kExitInvalidFlags);
  CHECK(Cli({"play", "--agents", "cql"}).code == kExitInvalidFlags);
  CHECK(Cli({"play", "--format", "xml"}).code == kExitInvalidFlags);
  CHECK(Cli({"serve", "--port", "70000"}).code == kExitInvalidFlags);
  CHECK(Cli({"replay"}).code == kExitInvalidFlags);
  CHECK(Cli({"train", "--config", "/nonexistent.cfg"}).code == kExitInvalidFlags);
  const auto cfg = Temp("bad.cfg");
  std::ofstream(cfg) << "batch_size=-3\n";
  CHECK(Cli({"train", "--config", cfg.string()}).code == kExitInvalidFlags);
  fs::remove(cfg);
  CHECK(Cli({"--help"}).code == kExitOk);
}

TEST_CASE("replay validates records") {
  const Run ok = Cli({"replay", kRecord});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("winner Landlord") != std::string::npos);
  const Run dec = Cli({"replay", kRecord, "--decompositions", "3"});
  CHECK(dec.out.size() > ok.out.size());

  const Run j = Cli({"replay", kRecord, "--format", "json"});
  CHECK(ReplayRecord(RecordFromJson(json::parse(j.out))).winner() == Seat::kLandlord);

  std::ifstream in(kRecord);
  std::stringstream text;
  text << in.rdbuf();
  std::string tampered = text.str();
  tampered.replace(tampered.find("| Q,Q,A,A,A\n"), 12, "| K,K,A,A,A\n");
  const auto path = Temp("tampered.txt");
  std::ofstream(path) << tampered;
  const Run bad = Cli({"replay", path.string()});
  CHECK(bad.code == kExitBadRecord);
  CHECK(bad.err.find("round 3") != std::string::npos);
  fs::remove(path);
  CHECK(Cli({"replay", "/nonexistent/record.txt"}).code == kExitBadRecord);
}

TEST_CASE("play writes a grid or a match report") {
  const auto out = Temp("grid.json");
  const Run grid = Cli({"play", "--episodes", "10", "--repeats", "2", "--seed", "4", "--format",
                        "json", "--out", out.string()});
  CHECK(grid.code == kExitOk);
  std::ifstream in(out);
  const json g = json::parse(in);
  CHECK(g["rows"].size() == 6);
  fs::remove(out);

  const Run text = Cli({"play", "--episodes", "10", "--repeats", "1"});
  CHECK(text.out.find("rhcp as Peasant Up") != std::string::npos);

  const Run match = Cli({"play", "--landlord", "rhcp", "--down", "random", "--up", "random",
                         "--episodes", "20", "--repeats", "2", "--format", "json"});
  CHECK(match.code == kExitOk);
  const json m = json::parse(match.out);
  CHECK(m["agents"]["Landlord"] == "rhcp");
  CHECK(m["landlord_by_repeat"].size() == 2);
  // Same seed, same report.
  CHECK(Cli({"play", "--landlord", "rhcp", "--down", "random", "--up", "random", "--episodes",
             "20", "--repeats", "2", "--format", "json"})
            .out == match.out);
}

TEST_CASE("train writes a curve and a loadable checkpoint") {
  const auto cfg = Temp("tiny.cfg");
  std::ofstream(cfg) << "fc1_widths=16\n"
                        "head_widths=16\n"
                        "sampling_limit=10\n"
                        "steps_per_epoch=20\n"
                        "batch_size=4\n"
                        "memory=100\n"
                        "eval_episodes=2\n"
                        "autoencoder_max_epochs=1\n"
                        "autoencoder_target_accuracy=0\n"
                        "opponent=random\n";
  const auto curve = Temp("curve.jsonl");
  const auto ckpt = Temp("model.bin");
  const Run r = Cli({"train", "--config", cfg.string(), "--epochs", "2", "--episodes", "4",
                     "--seed", "3", "--out", curve.string(), "--checkpoint", ckpt.string()});
  REQUIRE(r.code == kExitOk);
  std::ifstream in(curve);
  std::vector<json> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(json::parse(line));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0]["epoch"] == 1);
  CHECK(lines[1]["train_steps"] == 40);
  CHECK(lines[1]["winrates"].contains("Landlord"));
  CHECK(lines[2]["final"] == true);
  CHECK(lines[2]["episodes"] == 4);
  CHECK(lines[2]["random_baseline"].contains("Landlord"));
  const LoadedCheckpoint loaded = LoadCheckpoint(ckpt.string());
  CHECK(loaded.learner->config().fc1_widths == std::vector<int>{16});

  const Run play = Cli({"play", "--agents", "cql", "--environments", "random", "--checkpoint",
                        ckpt.string(), "--episodes", "4", "--repeats", "1"});
  CHECK(play.code == kExitOk);
  CHECK(play.out.find("as Landlord") != std::string::npos);
  for (const auto& p : {cfg, curve, ckpt}) fs::remove(p);
  fs::remove(ckpt.string() + ".json");
}

}  // namespace
}  // namespace ddz
