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

#include "ddz/movegen.h"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "test_util.h"

namespace ddz {
namespace {

int CountOf(Category c) { return Catalog().CategoryCounts()[static_cast<int>(c)]; }

TEST_CASE("catalog size and per-category counts") {
  const ActionCatalog& catalog = Catalog();
  CHECK(catalog.size() == 13527);
  CHECK(catalog.at(ActionCatalog::kPassIndex).IsPass());
  CHECK(CountOf(Category::kSolo) == 15);
  CHECK(CountOf(Category::kPair) == 13);
  CHECK(CountOf(Category::kTrio) == 13);
  CHECK(CountOf(Category::kBomb) == 13);
  CHECK(CountOf(Category::kNuke) == 1);
  CHECK(CountOf(Category::kSequentialSolos) == 36);
  CHECK(CountOf(Category::kSequentialPairs) == 52);
  CHECK(CountOf(Category::kSequentialTriosTakeNone) == 45);
  CHECK(CountOf(Category::kSequentialTriosTakeOne) == 13 * 14);
  CHECK(CountOf(Category::kSequentialTriosTakeTwo) == 13 * 12);
  CHECK(CountOf(Category::kSequentialTriosSeriesTakeOne) == 8033);
  CHECK(CountOf(Category::kSequentialTriosSeriesTakeTwo) == 2939);
  CHECK(CountOf(Category::kFourTakeTwoSolos) == 13 * 90);
  CHECK(CountOf(Category::kFourTakeTwoPairs) == 13 * 66);
  CHECK(CountOf(Category::kNone) == 0);
}

TEST_CASE("catalog order is category-major and deterministic") {
  const ActionCatalog a = EnumerateAllMoves();
  const ActionCatalog& b = Catalog();
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i) CHECK(a.at(i) == b.at(i));
  for (int i = 2; i < a.size(); ++i) {
    const CardGroup& prev = a.at(i - 1).group();
    const CardGroup& cur = a.at(i).group();
    CHECK(std::tuple(prev.category, prev.run_length, prev.principal) <=
          std::tuple(cur.category, cur.run_length, cur.principal));
  }
  for (int i = 0; i < a.size(); ++i) CHECK(*a.IndexOf(a.at(i).cards()) == i);
}

TEST_CASE("legal moves examples") {
  const auto leading = LegalMoves(ParseCards("33"), std::nullopt);
  REQUIRE(leading.size() == 2);
  CHECK(leading[0].group().category == Category::kSolo);
  CHECK(leading[1].group().category == Category::kPair);

  const auto answer = LegalMoves(ParseCards("33"), Classify(ParseCards("A")));
  REQUIRE(answer.size() == 1);
  CHECK(answer[0].IsPass());

  const auto twos = LegalMoves(ParseCards("2,2"), Classify(ParseCards("T,T")));
  CHECK(std::find(twos.begin(), twos.end(), Move(*Classify(ParseCards("22")))) !=
        twos.end());
  CHECK(twos.back().IsPass());
}

TEST_CASE("legal moves agree with brute-force catalog filtering") {
  std::mt19937_64 rng(11);
  const ActionCatalog& catalog = Catalog();
  for (int trial = 0; trial < 300; ++trial) {
    const CardMultiset hand = testing::RandomHand(rng, 1 + trial % 8);
    std::optional<CardGroup> incumbent;
    if (trial % 2 == 1) {
      std::uniform_int_distribution<int> pick(1, catalog.size() - 1);
      incumbent = catalog.at(pick(rng)).group();
    }
    std::vector<int> expected;
    for (int i = 1; i < catalog.size(); ++i) {
      const CardGroup& g = catalog.at(i).group();
      if (!hand.Contains(g.cards)) continue;
      if (incumbent && !Beats(g, *incumbent)) continue;
      expected.push_back(i);
    }
    if (incumbent) expected.push_back(ActionCatalog::kPassIndex);
    CHECK(LegalMoveIndices(hand, incumbent) == expected);

    // Responding is a subset of leading (minus Pass).
    const auto lead = LegalMoveIndices(hand, std::nullopt);
    for (int index : LegalMoveIndices(hand, incumbent)) {
      if (index == ActionCatalog::kPassIndex) continue;
      CHECK(std::binary_search(lead.begin(), lead.end(), index));
    }
  }
}

}  // namespace
}  // namespace ddz
