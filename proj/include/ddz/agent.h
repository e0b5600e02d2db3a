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

#ifndef DDZ_AGENT_H_
#define DDZ_AGENT_H_

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ddz/engine.h"
#include "ddz/rhcp.h"

namespace ddz {

// A policy for one seat. Act is only called on the agent's own turn and must
// return a legal move.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual Move Act(const Observation& obs, std::mt19937_64& rng) = 0;
  virtual std::string name() const = 0;
  // Called once per finished game with this seat's reward.
  virtual void GameOver(const Observation& /*obs*/, int /*reward*/) {}
};

// Uniform over LegalMoveIndices.
class RandomAgent : public Agent {
 public:
  Move Act(const Observation& obs, std::mt19937_64& rng) override;
  std::string name() const override { return "random"; }
};

class RhcpAgent : public Agent {
 public:
  explicit RhcpAgent(RhcpConfig config = {}) : rhcp_(config) {}
  Move Act(const Observation& obs, std::mt19937_64& rng) override;
  std::string name() const override { return "rhcp"; }

 private:
  Rhcp rhcp_;
};

// Plays a fixed list of moves in order, e.g. one seat's moves from a game
// record. When the list runs out or its next move is illegal it passes if it
// may and otherwise plays the lowest catalog-index legal move.
class ScriptedAgent : public Agent {
 public:
  ScriptedAgent() = default;
  explicit ScriptedAgent(std::vector<Move> moves) : moves_(std::move(moves)) {}
  Move Act(const Observation& obs, std::mt19937_64& rng) override;
  void GameOver(const Observation& obs, int reward) override;
  std::string name() const override { return "scripted"; }
  // Moves taken from the script in the current game.
  int scripted_moves() const { return next_; }

 private:
  std::vector<Move> moves_;
  int next_ = 0;
};

using SeatAgents = std::array<Agent*, kNumSeats>;

// Plays `state` to the end, then calls GameOver on every agent. Throws
// IllegalMoveError when an agent returns an illegal move.
GameState PlayGame(const SeatAgents& agents, GameState state, std::mt19937_64& rng);

// Seed of episode `episode` under `master`. Distinct episodes get
// decorrelated streams.
std::uint64_t EpisodeSeed(std::uint64_t master, std::uint64_t episode);

}  // namespace ddz

#endif  // DDZ_AGENT_H_
