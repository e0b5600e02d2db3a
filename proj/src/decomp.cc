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

#include "ddz/decomp.h"

#include <algorithm>
#include <array>
#include <iterator>
#include <stdexcept>

#include "ddz/dlx.h"
#include "ddz/movegen.h"

namespace ddz {
namespace {

class DfsEnumerator {
 public:
  explicit DfsEnumerator(std::vector<Decomposition>* out)
      : catalog_(Catalog()), out_(out) {}

  // Groups sharing the same lowest rank are taken in non-decreasing catalog
  // order, so each partition is produced by exactly one path.
  void Run(const CardMultiset& remaining, int low_rank, size_t first) {
    if (remaining.Empty()) {
      Decomposition d{chosen_};
      std::sort(d.groups.begin(), d.groups.end());
      out_->push_back(std::move(d));
      return;
    }
    const Rank low = *remaining.LowestRank();
    if (RankIndex(low) != low_rank) first = 0;
    const auto bucket = catalog_.GroupsWithLowestRank(low);
    for (size_t i = first; i < bucket.size(); ++i) {
      const CardMultiset g = CardMultiset::FromPacked(catalog_.packed(bucket[i]));
      if (!remaining.Contains(g)) continue;
      chosen_.push_back(bucket[i]);
      Run(remaining - g, RankIndex(low), i);
      chosen_.pop_back();
    }
  }

 private:
  const ActionCatalog& catalog_;
  std::vector<Decomposition>* out_;
  std::vector<int> chosen_;
};

}  // namespace

std::string ToString(const Decomposition& d) {
  const ActionCatalog& catalog = Catalog();
  std::string out = "{";
  for (size_t i = 0; i < d.groups.size(); ++i) {
    if (i > 0) out += " | ";
    out += ToString(catalog.at(d.groups[i]));
  }
  return out + "}";
}

bool IsValidDecomposition(const Decomposition& d, const CardMultiset& hand) {
  const ActionCatalog& catalog = Catalog();
  if (d.groups.empty()) return false;
  std::array<int, kNumRanks> total{};
  for (int index : d.groups) {
    if (index <= ActionCatalog::kPassIndex || index >= catalog.size()) return false;
    const CardMultiset cards = CardMultiset::FromPacked(catalog.packed(index));
    const auto group = Classify(cards);
    if (!group || group->category == Category::kNone) return false;
    for (Rank r : kAllRanks) total[RankIndex(r)] += cards.Count(r);
  }
  for (Rank r : kAllRanks) {
    if (total[RankIndex(r)] != hand.Count(r)) return false;
  }
  return true;
}

std::vector<Decomposition> EnumerateDfs(const CardMultiset& hand) {
  std::vector<Decomposition> out;
  if (hand.Empty()) return out;
  DfsEnumerator(&out).Run(hand, -1, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Decomposition> EnumerateDlx(const CardMultiset& hand) {
  std::vector<Decomposition> out;
  if (hand.Empty()) return out;
  std::array<int, kNumRanks> offset{};
  int columns = 0;
  for (Rank r : kAllRanks) {
    offset[RankIndex(r)] = columns;
    columns += hand.Count(r);
  }
  ExactCover matrix(columns);
  const std::vector<int> groups = ContainedGroups(hand);
  const ActionCatalog& catalog = Catalog();
  std::vector<int> row_columns;
  for (int index : groups) {
    const CardMultiset cards = CardMultiset::FromPacked(catalog.packed(index));
    row_columns.clear();
    for (Rank r : kAllRanks) {
      for (int copy = 0; copy < cards.Count(r); ++copy) {
        row_columns.push_back(offset[RankIndex(r)] + copy);
      }
    }
    matrix.AddRow(row_columns);
  }
  matrix.Solve([&](std::span<const int> rows) {
    Decomposition d;
    for (int row : rows) d.groups.push_back(groups[row]);
    std::sort(d.groups.begin(), d.groups.end());
    out.push_back(std::move(d));
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

DecompositionSample SampleDecompositions(const CardMultiset& hand, int limit,
                                         std::mt19937_64& rng) {
  if (limit < 1) throw std::invalid_argument("sampling limit must be positive");
  DecompositionSample sample;
  std::vector<Decomposition> all =
      hand.Size() > kDfsMaxHandSize ? EnumerateDlx(hand) : EnumerateDfs(hand);
  if (static_cast<int>(all.size()) <= limit) {
    sample.decompositions = std::move(all);
    return sample;
  }
  sample.truncated = true;
  sample.decompositions.reserve(limit);
  std::sample(std::make_move_iterator(all.begin()), std::make_move_iterator(all.end()),
              std::back_inserter(sample.decompositions), limit, rng);
  return sample;
}

}  // namespace ddz
