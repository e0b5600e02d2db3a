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
#include <chrono>
#include <functional>
#include <set>

#include "ddz/dlx.h"
#include "ddz/movegen.h"
#include "doctest.h"
#include "oracles.h"
#include "test_util.h"

namespace ddz {
namespace {

using testing::BruteForcePartitions;

std::vector<std::uint64_t> Key(const Decomposition& d) {
  std::vector<std::uint64_t> key;
  for (int index : d.groups) key.push_back(Catalog().packed(index));
  std::sort(key.begin(), key.end());
  return key;
}

TEST_CASE("exact cover solver") {
  // Knuth's example matrix; the unique cover is rows {0, 3, 4}.
  ExactCover m(7);
  m.AddRow(std::vector<int>{2, 4, 5});
  m.AddRow(std::vector<int>{0, 3, 6});
  m.AddRow(std::vector<int>{1, 2, 5});
  m.AddRow(std::vector<int>{0, 3});
  m.AddRow(std::vector<int>{1, 6});
  m.AddRow(std::vector<int>{3, 4, 6});
  std::vector<std::vector<int>> covers;
  m.Solve([&](std::span<const int> rows) {
    covers.emplace_back(rows.begin(), rows.end());
    std::sort(covers.back().begin(), covers.back().end());
    return true;
  });
  REQUIRE(covers.size() == 1);
  CHECK(covers[0] == std::vector<int>{0, 3, 4});

  ExactCover empty_rows(2);
  int count = 0;
  empty_rows.Solve([&](std::span<const int>) { return ++count, true; });
  CHECK(count == 0);

  ExactCover many(2);
  many.AddRow(std::vector<int>{0});
  many.AddRow(std::vector<int>{1});
  many.AddRow(std::vector<int>{0, 1});
  many.AddRow(std::vector<int>{0, 1});
  count = 0;
  many.Solve([&](std::span<const int>) { return ++count, true; });
  CHECK(count == 3);
  count = 0;
  many.Solve([&](std::span<const int>) { return ++count, false; });
  CHECK(count == 1);
}

TEST_CASE("dfs examples") {
  const auto trio = EnumerateDfs(ParseCards("333"));
  REQUIRE(trio.size() == 3);
  std::set<std::string> names;
  for (const auto& d : trio) names.insert(ToString(d));
  CHECK(names == std::set<std::string>{"{3,3,3}", "{3 | 3,3}", "{3 | 3 | 3}"});

  const auto jokers = EnumerateDfs(ParseCards("*$"));
  REQUIRE(jokers.size() == 2);
  CHECK(ToString(jokers[0]) == "{* | $}");
  CHECK(ToString(jokers[1]) == "{*,$}");

  const auto single = EnumerateDfs(ParseCards("3"));
  REQUIRE(single.size() == 1);
  CHECK(ToString(single[0]) == "{3}");

  CHECK(EnumerateDfs(CardMultiset()).empty());
}

TEST_CASE("dfs matches a brute-force set-partition oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 150; ++trial) {
    const int size = 1 + static_cast<int>(rng() % 7);
    const CardMultiset hand = testing::RandomHand(rng, size);
    const auto oracle = BruteForcePartitions(hand);
    const auto dfs = EnumerateDfs(hand);
    std::set<std::vector<std::uint64_t>> got;
    for (const auto& d : dfs) got.insert(Key(d));
    CHECK_MESSAGE(got.size() == dfs.size(), FormatCards(hand));
    CHECK_MESSAGE(got == oracle, FormatCards(hand));
  }
  // Hands rich in repeats stress the duplicate suppression.
  for (const char* text : {"3333", "33334444", "333444555", "334455*$", "2222*$"}) {
    const CardMultiset hand = ParseCards(text);
    const auto dfs = EnumerateDfs(hand);
    std::set<std::vector<std::uint64_t>> got;
    for (const auto& d : dfs) got.insert(Key(d));
    CHECK_MESSAGE(got.size() == dfs.size(), text);
    CHECK_MESSAGE(got == BruteForcePartitions(hand), text);
  }
}

TEST_CASE("dlx results are valid and contained in dfs") {
  CHECK(EnumerateDlx(ParseCards("333")) ==
        std::vector<Decomposition>{*EnumerateDfs(ParseCards("333")).rbegin()});
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int size = 1 + static_cast<int>(rng() % kDfsMaxHandSize);
    const CardMultiset hand = testing::RandomHand(rng, size);
    const auto dfs = EnumerateDfs(hand);
    const auto dlx = EnumerateDlx(hand);
    CHECK(!dlx.empty());
    for (const auto& d : dlx) {
      CHECK(IsValidDecomposition(d, hand));
      CHECK_MESSAGE(std::binary_search(dfs.begin(), dfs.end(), d), ToString(d));
    }
    for (const auto& d : dfs) CHECK(IsValidDecomposition(d, hand));
  }
}

TEST_CASE("validity check rejects broken partitions") {
  const ActionCatalog& catalog = Catalog();
  const CardMultiset hand = ParseCards("3345");
  const int three = *catalog.IndexOf(ParseCards("3"));
  const int pair = *catalog.IndexOf(ParseCards("33"));
  const int four = *catalog.IndexOf(ParseCards("4"));
  const int five = *catalog.IndexOf(ParseCards("5"));
  CHECK(IsValidDecomposition({{three, three, four, five}}, hand));
  CHECK(IsValidDecomposition({{pair, four, five}}, hand));
  CHECK_FALSE(IsValidDecomposition({{three, four, five}}, hand));
  CHECK_FALSE(IsValidDecomposition({{pair, three, four, five}}, hand));
  CHECK_FALSE(IsValidDecomposition({{}}, CardMultiset()));
  CHECK_FALSE(IsValidDecomposition({{0, pair, four, five}}, hand));
}

TEST_CASE("sampling") {
  std::mt19937_64 rng(3);
  const auto small = SampleDecompositions(ParseCards("333"), 100, rng);
  CHECK(small.decompositions.size() == 3);
  CHECK_FALSE(small.truncated);

  const auto one = SampleDecompositions(ParseCards("33445566"), 1, rng);
  REQUIRE(one.decompositions.size() == 1);
  CHECK(one.truncated);
  CHECK(IsValidDecomposition(one.decompositions[0], ParseCards("33445566")));

  CHECK_THROWS(SampleDecompositions(ParseCards("3"), 0, rng));

  for (int trial = 0; trial < 20; ++trial) {
    const CardMultiset hand = testing::RandomHand(rng, 17);
    const auto full = EnumerateDlx(hand);
    std::mt19937_64 a(trial), b(trial);
    const auto s1 = SampleDecompositions(hand, 100, a);
    const auto s2 = SampleDecompositions(hand, 100, b);
    CHECK(s1.decompositions == s2.decompositions);
    CHECK(s1.decompositions.size() == std::min<size_t>(full.size(), 100));
    CHECK(s1.truncated == (full.size() > 100));
    CHECK(std::is_sorted(s1.decompositions.begin(), s1.decompositions.end()));
    CHECK(std::adjacent_find(s1.decompositions.begin(), s1.decompositions.end()) ==
          s1.decompositions.end());
    for (const auto& d : s1.decompositions) CHECK(IsValidDecomposition(d, hand));
  }
}

TEST_CASE("twenty-card sampling is fast") {
  std::mt19937_64 rng(17);
  Catalog();
  double worst_ms = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const CardMultiset hand = testing::RandomHand(rng, 20);
    const auto start = std::chrono::steady_clock::now();
    const auto s = SampleDecompositions(hand, kDefaultSampleLimit, rng);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    worst_ms = std::max(worst_ms, ms);
    CHECK(!s.decompositions.empty());
  }
  MESSAGE("worst 20-card sampling time (ms): " << worst_ms);
  CHECK(worst_ms < 100.0);
}

}  // namespace
}  // namespace ddz
