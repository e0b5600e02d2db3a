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

#include "ddz/agent.h"

#include <algorithm>

namespace ddz {

Move RandomAgent::Act(const Observation& obs, std::mt19937_64& rng) {
  const std::vector<int> legal = obs.LegalMoveIndices();
  std::uniform_int_distribution<size_t> pick(0, legal.size() - 1);
  return Catalog().at(legal[pick(rng)]);
}

Move RhcpAgent::Act(const Observation& obs, std::mt19937_64&) {
  return rhcp_.Act(obs.own_hand, obs.incumbent_group());
}

Move ScriptedAgent::Act(const Observation& obs, std::mt19937_64&) {
  const std::vector<int> legal = obs.LegalMoveIndices();
  if (next_ < static_cast<int>(moves_.size())) {
    const auto index = Catalog().IndexOf(moves_[next_].cards());
    if (index && std::find(legal.begin(), legal.end(), *index) != legal.end()) {
      ++next_;
      return Catalog().at(*index);
    }
  }
  if (obs.incumbent) return Move::Pass();
  return Catalog().at(legal.front());
}

void ScriptedAgent::GameOver(const Observation&, int) { next_ = 0; }

GameState PlayGame(const SeatAgents& agents, GameState state, std::mt19937_64& rng) {
  while (!state.IsTerminal()) {
    const Seat seat = state.to_act();
    state = state.Apply(agents[SeatIndex(seat)]->Act(state.Observe(seat), rng));
  }
  const auto rewards = state.Rewards();
  for (Seat seat : kAllSeats) {
    agents[SeatIndex(seat)]->GameOver(state.Observe(seat), rewards[SeatIndex(seat)]);
  }
  return state;
}

std::uint64_t EpisodeSeed(std::uint64_t master, std::uint64_t episode) {
  // SplitMix64 finalizer over the pair.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (episode + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ddz
