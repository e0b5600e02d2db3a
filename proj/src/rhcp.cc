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

#include "ddz/rhcp.h"

#include <limits>
#include <stdexcept>
#include <tuple>

namespace ddz {

const std::vector<Score>& CatalogScores() {
  static const std::vector<Score> scores = [] {
    const ActionCatalog& catalog = Catalog();
    std::vector<Score> out(catalog.size());
    for (int i = 1; i < catalog.size(); ++i) out[i] = CategoryScore(catalog.at(i).group());
    return out;
  }();
  return scores;
}

Rhcp::Rhcp(RhcpConfig config) : config_(config) {
  if (config_.pass_penalty < Score()) {
    throw std::invalid_argument("pass_penalty must be non-negative");
  }
}

std::vector<std::vector<int>> Rhcp::Candidates(const CardMultiset& hand) const {
  const ActionCatalog& catalog = Catalog();
  std::vector<std::vector<int>> by_low_rank(kNumRanks);
  for (int index : ContainedGroups(hand)) {
    const CardMultiset g = CardMultiset::FromPacked(catalog.packed(index));
    by_low_rank[RankIndex(*g.LowestRank())].push_back(index);
  }
  return by_low_rank;
}

// Every partition has exactly one group holding the lowest card, so it is
// enough to branch over groups whose lowest rank is the hand's lowest rank.
Score Rhcp::Partition(const CardMultiset& hand,
                      const std::vector<std::vector<int>>& by_low_rank) {
  if (hand.Empty()) return Score();
  if (config_.memoize) {
    const auto it = cache_.find(hand.Packed());
    if (it != cache_.end()) return it->second;
  }
  const ActionCatalog& catalog = Catalog();
  const std::vector<Score>& scores = CatalogScores();
  std::optional<Score> best;
  for (int index : by_low_rank[RankIndex(*hand.LowestRank())]) {
    const CardMultiset g = CardMultiset::FromPacked(catalog.packed(index));
    if (!hand.Contains(g)) continue;
    const Score q = scores[index] + Partition(hand - g, by_low_rank);
    if (!best || q > *best) best = q;
  }
  if (!best) throw std::logic_error("hand has no partition: " + FormatCards(hand));
  if (config_.memoize) {
    if (cache_.size() >= config_.max_cache_entries) cache_.clear();
    cache_.emplace(hand.Packed(), *best);
  }
  return *best;
}

Score Rhcp::BestPartitionScore(const CardMultiset& hand) {
  if (hand.Empty()) return Score();
  return Partition(hand, Candidates(hand));
}

Score Rhcp::StrategyScore(const CardGroup& group, const CardMultiset& hand) {
  if (!hand.Contains(group.cards)) {
    throw std::invalid_argument("group is not contained in hand");
  }
  return CategoryScore(group) + BestPartitionScore(hand - group.cards);
}

Rhcp::Choice Rhcp::BestGroup(const CardMultiset& hand) {
  if (hand.Empty()) throw std::invalid_argument("BestGroup of an empty hand");
  const ActionCatalog& catalog = Catalog();
  const std::vector<Score>& scores = CatalogScores();
  const auto by_low_rank = Candidates(hand);
  std::optional<Choice> best;
  auto key = [&](const Choice& c) {
    const CardGroup& g = catalog.at(c.index).group();
    return std::make_tuple(c.score, g.cards.Size(), g.principal, -c.index);
  };
  for (const auto& bucket : by_low_rank) {
    for (int index : bucket) {
      const CardMultiset g = CardMultiset::FromPacked(catalog.packed(index));
      const Choice c{index, scores[index] + Partition(hand - g, by_low_rank)};
      if (!best || key(c) > key(*best)) best = c;
    }
  }
  return *best;
}

Move Rhcp::Act(const CardMultiset& hand, const std::optional<CardGroup>& incumbent) {
  const ActionCatalog& catalog = Catalog();
  if (!incumbent) return catalog.at(BestGroup(hand).index);

  const std::vector<Score>& scores = CatalogScores();
  const auto by_low_rank = Candidates(hand);
  const Score pass_score = Partition(hand, by_low_rank) - config_.pass_penalty;
  std::optional<Choice> best;
  auto key = [&](const Choice& c) {
    return std::make_tuple(c.score, -scores[c.index].halves(),
                           -RankIndex(catalog.at(c.index).group().principal), -c.index);
  };
  for (int index : LegalMoveIndices(hand, incumbent)) {
    if (index == ActionCatalog::kPassIndex) continue;
    const CardMultiset g = CardMultiset::FromPacked(catalog.packed(index));
    const Choice c{index, scores[index] + Partition(hand - g, by_low_rank)};
    if (!best || key(c) > key(*best)) best = c;
  }
  if (!best || pass_score > best->score) return Move::Pass();
  return catalog.at(best->index);
}

}  // namespace ddz
