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

#ifndef DDZ_RHCP_H_
#define DDZ_RHCP_H_

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ddz/cards.h"
#include "ddz/movegen.h"

namespace ddz {

struct RhcpConfig {
  Score pass_penalty = Score::FromInt(3);
  // The score cache is dropped once it holds this many hands.
  std::size_t max_cache_entries = 1 << 20;
  bool memoize = true;
};

// Recursive hand partitioning. Q(C, H) = r(C) + P(H - C), where P(H) is the
// best total category score over partitions of H and P(empty) = 0.
class Rhcp {
 public:
  explicit Rhcp(RhcpConfig config = {});

  struct Choice {
    int index = ActionCatalog::kPassIndex;  // Catalog index.
    Score score;
  };

  // P(hand).
  Score BestPartitionScore(const CardMultiset& hand);
  // Q(group, hand). Precondition: `group` is a legal group contained in
  // `hand`.
  Score StrategyScore(const CardGroup& group, const CardMultiset& hand);
  // argmax_C Q(C, hand); ties go to the larger group, then the higher
  // principal rank, then the lower catalog index. Precondition: `hand` is
  // not empty.
  Choice BestGroup(const CardMultiset& hand);

  // Leading: BestGroup. Responding: the beating move with the highest Q, or
  // Pass when P(hand) - pass_penalty is strictly higher (or nothing beats).
  // Equal Q prefers the lower category score, then the lower principal.
  Move Act(const CardMultiset& hand, const std::optional<CardGroup>& incumbent);

  const RhcpConfig& config() const { return config_; }
  std::size_t cache_size() const { return cache_.size(); }
  void ClearCache() { cache_.clear(); }

 private:
  Score Partition(const CardMultiset& hand,
                  const std::vector<std::vector<int>>& by_low_rank);
  std::vector<std::vector<int>> Candidates(const CardMultiset& hand) const;

  RhcpConfig config_;
  std::unordered_map<std::uint64_t, Score> cache_;
};

// Category score of every catalog entry (Pass scores 0).
const std::vector<Score>& CatalogScores();

}  // namespace ddz

#endif  // DDZ_RHCP_H_
