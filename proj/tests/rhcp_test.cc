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

#include <algorithm>
#include <chrono>

#include "doctest.h"
#include "oracles.h"
#include "test_util.h"

namespace ddz {
namespace {

CardGroup G(std::string_view text) { return *Classify(ParseCards(text)); }

std::string BestName(Rhcp& rhcp, std::string_view hand) {
  return ToString(Catalog().at(rhcp.BestGroup(ParseCards(hand)).index));
}

TEST_CASE("strategy score examples") {
  Rhcp rhcp;
  CHECK(rhcp.StrategyScore(G("33"), ParseCards("33")) == Score::FromInt(-7));
  CHECK(rhcp.StrategyScore(G("3"), ParseCards("33")) == Score::FromInt(-14));
  CHECK(rhcp.StrategyScore(G("*$"), ParseCards("*$")) == Score::FromInt(20));
  CHECK(rhcp.BestPartitionScore(CardMultiset()) == Score());
  CHECK_THROWS(rhcp.StrategyScore(G("44"), ParseCards("33")));
}

TEST_CASE("best group examples") {
  Rhcp rhcp;
  CHECK(BestName(rhcp, "33") == "3,3");
  CHECK(rhcp.BestGroup(ParseCards("33")).score == Score::FromInt(-7));
  CHECK(BestName(rhcp, "34567") == "3,4,5,6,7");
  CHECK(rhcp.BestGroup(ParseCards("34567")).score == Score::FromInt(-2));
  CHECK(BestName(rhcp, "*$") == "*,$");
  CHECK(rhcp.BestGroup(ParseCards("*$")).score == Score::FromInt(20));
  CHECK_THROWS(rhcp.BestGroup(CardMultiset()));
}

TEST_CASE("act examples") {
  Rhcp rhcp;
  CHECK(ToString(rhcp.Act(ParseCards("33"), std::nullopt)) == "3,3");
  CHECK(rhcp.Act(ParseCards("33"), G("A")).IsPass());
  // Solo 4 and the nuke both reach 14; the cheaper category is kept back
  // less, so the solo is played. Pass would score 14 - 3.
  CHECK(rhcp.StrategyScore(G("4"), ParseCards("4*$")) == Score::FromInt(14));
  CHECK(rhcp.StrategyScore(G("*$"), ParseCards("4*$")) == Score::FromInt(14));
  CHECK(ToString(rhcp.Act(ParseCards("4*$"), G("3"))) == "4");
  // Breaking a pair: Q(5) = -10 against a pass score of -5 - penalty.
  CHECK(rhcp.Act(ParseCards("55"), G("4")).IsPass());
  Rhcp patient(RhcpConfig{.pass_penalty = Score::FromInt(6)});
  CHECK(ToString(patient.Act(ParseCards("55"), G("4"))) == "5");
  // A zero penalty only ever ties, and ties are played.
  Rhcp no_penalty(RhcpConfig{.pass_penalty = Score()});
  CHECK(ToString(no_penalty.Act(ParseCards("5555"), G("4"))) == "5,5,5,5");
  CHECK_THROWS(Rhcp(RhcpConfig{.pass_penalty = Score::FromInt(-1)}));
}

TEST_CASE("best group matches the brute-force partition oracle") {
  std::mt19937_64 rng(2024);
  Rhcp rhcp;
  for (int trial = 0; trial < 300; ++trial) {
    const int size = 1 + static_cast<int>(rng() % 8);
    const CardMultiset hand = testing::RandomHand(rng, size);
    const testing::OracleBest oracle = testing::BruteForceBestGroup(hand);
    const Rhcp::Choice choice = rhcp.BestGroup(hand);
    const CardGroup& g = Catalog().at(choice.index).group();
    CHECK_MESSAGE(choice.score == oracle.score, FormatCards(hand));
    CHECK_MESSAGE(std::find(oracle.argmax.begin(), oracle.argmax.end(), g.cards) !=
                      oracle.argmax.end(),
                  FormatCards(hand));
    for (const CardMultiset& other : oracle.argmax) {
      const CardGroup o = *Classify(other);
      CHECK(std::make_tuple(g.cards.Size(), g.principal) >=
            std::make_tuple(o.cards.Size(), o.principal));
    }
  }
}

TEST_CASE("memoized and unmemoized scores agree") {
  std::mt19937_64 rng(9);
  Rhcp memo;
  Rhcp plain(RhcpConfig{.memoize = false});
  for (int trial = 0; trial < 100; ++trial) {
    const CardMultiset hand = testing::RandomHand(rng, 1 + static_cast<int>(rng() % 9));
    CHECK(memo.BestPartitionScore(hand) == plain.BestPartitionScore(hand));
    for (int index : ContainedGroups(hand)) {
      const CardGroup& g = Catalog().at(index).group();
      CHECK(memo.StrategyScore(g, hand) == plain.StrategyScore(g, hand));
    }
  }
  CHECK(plain.cache_size() == 0);
  CHECK(memo.cache_size() > 0);
}

TEST_CASE("strategy score depends only on the remainder") {
  std::mt19937_64 rng(4);
  Rhcp a, b;
  for (int trial = 0; trial < 100; ++trial) {
    const CardMultiset hand = testing::RandomHand(rng, 12);
    const auto groups = ContainedGroups(hand);
    const CardGroup& g = Catalog().at(groups[rng() % groups.size()]).group();
    // A fresh instance with a cold cache and a hand built in another order.
    std::vector<Rank> cards = hand.Cards();
    std::reverse(cards.begin(), cards.end());
    CardMultiset rebuilt;
    for (Rank r : cards) rebuilt.Add(r);
    Rhcp fresh;
    CHECK(a.StrategyScore(g, hand) == fresh.StrategyScore(g, rebuilt));
    CHECK(a.StrategyScore(g, hand) ==
          CategoryScore(g) + b.BestPartitionScore(hand - g.cards));
  }
}

TEST_CASE("adding the nuke never lowers the best score") {
  std::mt19937_64 rng(8);
  Rhcp rhcp;
  const CardMultiset nuke = ParseCards("*$");
  for (int trial = 0; trial < 200; ++trial) {
    CardMultiset hand = testing::RandomHand(rng, 1 + static_cast<int>(rng() % 16));
    hand = hand - CardMultiset::FromCounts(
                      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
                       hand.Count(Rank::kBlackJoker), hand.Count(Rank::kRedJoker)});
    if (hand.Empty()) continue;
    CHECK(rhcp.BestGroup(hand + nuke).score >= rhcp.BestGroup(hand).score);
  }
}

TEST_CASE("cache is bounded") {
  Rhcp rhcp(RhcpConfig{.max_cache_entries = 16});
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    rhcp.BestGroup(testing::RandomHand(rng, 10));
    CHECK(rhcp.cache_size() <= 16);
  }
}

TEST_CASE("twenty-card decisions are fast") {
  std::mt19937_64 rng(21);
  Rhcp rhcp;
  double worst_ms = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const CardMultiset hand = testing::RandomHand(rng, 20);
    const auto start = std::chrono::steady_clock::now();
    rhcp.ClearCache();
    rhcp.Act(hand, std::nullopt);
    worst_ms = std::max(worst_ms, std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - start)
                                      .count());
  }
  MESSAGE("worst cold 20-card RHCP decision (ms): " << worst_ms);
  CHECK(worst_ms < 2000.0);
}

}  // namespace
}  // namespace ddz
