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

#include "ddz/cql.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "test_util.h"

namespace ddz {
namespace {

std::shared_ptr<const LatentTable> Latents() {
  static const auto table = [] {
    GroupAutoencoder encoder;
    return std::make_shared<const LatentTable>(encoder);
  }();
  return table;
}

CqlConfig SmallConfig(std::uint64_t seed = 3) {
  CqlConfig c;
  c.fc1_widths = {32, 32};
  c.head_widths = {32, 16};
  c.sampling_limit = 12;
  c.learning_rate = 1e-3;
  c.seed = seed;
  return c;
}

// Acting never triggers an update.
TrainingConfig NoUpdates() {
  TrainingConfig t;
  t.update_frequency = 1 << 30;
  return t;
}

TrainingConfig SmallTraining() {
  TrainingConfig t;
  t.batch_size = 4;
  t.memory = 200;
  t.steps_per_epoch = 40;
  t.epochs = 2;
  t.update_frequency = 2;
  t.target_sync_period = 1000;
  t.eval_episodes = 4;
  t.final_eval_episodes = 4;
  return t;
}

Decomposition D(std::initializer_list<const char*> groups) {
  Decomposition d;
  for (const char* g : groups) d.groups.push_back(*Catalog().IndexOf(ParseCards(g)));
  std::sort(d.groups.begin(), d.groups.end());
  return d;
}

nn::RowVector RandomState(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  nn::RowVector s(kStateFeatureSize);
  for (int i = 0; i < s.cols(); ++i) s(i) = u(rng);
  return s;
}

nn::Parameter* Find(CqlNetwork& net, const std::string& name) {
  for (nn::Parameter* p : net.Parameters()) {
    if (p->name == name) return p;
  }
  FAIL("no parameter " << name);
  return nullptr;
}

// Makes both heads output `value` everywhere.
void ConstantHeads(CqlNetwork& net, double value) {
  for (const char* head : {"dpn", "mpn"}) {
    Find(net, std::string(head) + "/out.w")->value.setZero();
    Find(net, std::string(head) + "/out.b")->value.setConstant(value);
  }
}

// One full game by a learning landlord against RHCP peasants.
GameState PlayLearningGame(CqlLearner& learner, std::uint64_t seed,
                           std::int64_t* steps = nullptr) {
  CqlAgent agent(&learner, true);
  RhcpAgent down, up;
  std::mt19937_64 rng(seed);
  GameState end = PlayGame({&agent, &down, &up}, GameState::Deal(rng), rng);
  if (steps) *steps = agent.env_steps();
  return end;
}

TEST_CASE("hand-built two-stage episode targets") {
  CqlLearner learner(Latents(), SmallConfig());
  ConstantHeads(learner.online(), 0.25);
  learner.SyncTarget();

  std::mt19937_64 rng(1);
  auto c1 = std::make_shared<CombinationContext>();
  c1->state = RandomState(rng);
  c1->decompositions = {D({"3", "44"}), D({"3", "4", "4"})};
  auto f1 = std::make_shared<FineContext>();
  f1->parent = c1;
  f1->decomposition = 0;
  f1->candidates = {D({"3"}).groups[0], D({"44"}).groups[0]};

  Transition tc{Stage::kCombination, c1, nullptr, 0, 0.0, f1, nullptr};
  Transition tf{Stage::kFine, nullptr, f1, 1, -1.0, nullptr, nullptr};
  CHECK(tf.terminal());
  CHECK_FALSE(tc.terminal());
  // Terminal: y = r. Non-terminal with gamma 1: y = 0 + Q(next) = 0.25.
  CHECK(learner.Target(tf) == -1.0);
  CHECK(learner.Target(tc) == 0.25);

  // A fine stage followed by another combination stage.
  Transition mid{Stage::kFine, nullptr, f1, 0, 0.0, nullptr, c1};
  CHECK(learner.Target(mid) == 0.25);

  CqlConfig discounted = SmallConfig();
  discounted.gamma = 0.5;
  CqlLearner half(Latents(), discounted);
  ConstantHeads(half.online(), 0.25);
  half.SyncTarget();
  CHECK(half.Target(tc) == 0.125);
  CHECK(half.Target(tf) == -1.0);
}

TEST_CASE("double-Q target equals the max backup when online equals target") {
  CqlLearner learner(Latents(), SmallConfig(), NoUpdates());
  for (std::uint64_t seed = 0; seed < 3; ++seed) PlayLearningGame(learner, seed);
  REQUIRE(learner.buffer().size() > 10);
  for (int i = 0; i < learner.buffer().size(); ++i) {
    const Transition& t = learner.buffer().at(i);
    CHECK(learner.Target(t) == learner.MaxTarget(t));
  }

  // With a fresh online network the max backup is the plain maximum of the
  // target network's values.
  for (int i = 0; i < learner.buffer().size(); ++i) {
    const Transition& t = learner.buffer().at(i);
    double best = 0;
    if (t.next_fine) {
      const FineContext& f = *t.next_fine;
      const auto q = learner.target().MpnQ(learner.latents(), f.parent->state, f.chosen(),
                                           f.candidates);
      best = *std::max_element(q.begin(), q.end());
    } else if (t.next_combination) {
      const auto q = learner.target().DpnQ(learner.latents(), t.next_combination->state,
                                           t.next_combination->decompositions);
      best = *std::max_element(q.begin(), q.end());
    }
    CHECK(learner.MaxTarget(t) == t.reward + best);
  }
}

TEST_CASE("target network is frozen between syncs") {
  TrainingConfig tc = SmallTraining();
  tc.target_sync_period = 5;
  CqlLearner learner(Latents(), SmallConfig(), tc);
  for (std::uint64_t seed = 0; seed < 3; ++seed) PlayLearningGame(learner, seed);
  // Rebuild the buffer contents so training below starts from step 0.
  CqlLearner fresh(Latents(), SmallConfig(), tc);
  for (int i = 0; i < learner.buffer().size(); ++i) fresh.buffer().Add(learner.buffer().at(i));

  std::vector<double> before;
  for (int i = 0; i < fresh.buffer().size(); ++i) {
    before.push_back(fresh.MaxTarget(fresh.buffer().at(i)));
  }
  const double online_before = fresh.OnlineQ(fresh.buffer().at(0));
  std::mt19937_64 rng(2);
  for (int step = 0; step < 4; ++step) fresh.TrainStep(rng);
  CHECK(fresh.OnlineQ(fresh.buffer().at(0)) != online_before);
  for (int i = 0; i < fresh.buffer().size(); ++i) {
    CHECK(fresh.MaxTarget(fresh.buffer().at(i)) == before[i]);
  }
  fresh.TrainStep(rng);
  CHECK(fresh.train_steps() == 5);
  bool changed = false;
  for (int i = 0; i < fresh.buffer().size(); ++i) {
    changed |= fresh.MaxTarget(fresh.buffer().at(i)) != before[i];
    CHECK(fresh.Target(fresh.buffer().at(i)) == fresh.MaxTarget(fresh.buffer().at(i)));
  }
  CHECK(changed);
}

TEST_CASE("DPN and MPN are invariant to input order") {
  CqlNetwork net(Latents()->dim(), kStateFeatureSize, SmallConfig());
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CardMultiset hand = testing::RandomHand(rng, 12);
    std::vector<Decomposition> decomps =
        SampleDecompositions(hand, 30, rng).decompositions;
    const nn::RowVector state = RandomState(rng);
    const std::vector<double> q = net.DpnQ(*Latents(), state, decomps);

    std::vector<int> perm(decomps.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Decomposition> shuffled;
    for (int p : perm) {
      Decomposition d = decomps[p];
      std::shuffle(d.groups.begin(), d.groups.end(), rng);
      shuffled.push_back(d);
    }
    const std::vector<double> qs = net.DpnQ(*Latents(), state, shuffled);
    for (size_t i = 0; i < perm.size(); ++i) CHECK(qs[i] == q[perm[i]]);

    // A decomposition scored alone matches its batched score.
    CHECK(net.DpnQ(*Latents(), state, std::span(&decomps[0], 1))[0] == q[0]);

    const Decomposition& d = decomps[0];
    std::vector<int> cands = d.groups;
    cands.push_back(ActionCatalog::kPassIndex);
    const std::vector<double> m = net.MpnQ(*Latents(), state, d, cands);
    std::vector<int> cperm(cands.size());
    std::iota(cperm.begin(), cperm.end(), 0);
    std::shuffle(cperm.begin(), cperm.end(), rng);
    std::vector<int> cshuffled;
    for (int p : cperm) cshuffled.push_back(cands[p]);
    Decomposition dshuffled = d;
    std::shuffle(dshuffled.groups.begin(), dshuffled.groups.end(), rng);
    const std::vector<double> ms = net.MpnQ(*Latents(), state, dshuffled, cshuffled);
    for (size_t i = 0; i < cperm.size(); ++i) CHECK(ms[i] == m[cperm[i]]);
  }
}

TEST_CASE("identical groups in a decomposition score equally") {
  CqlNetwork net(Latents()->dim(), kStateFeatureSize, SmallConfig());
  std::mt19937_64 rng(6);
  const Decomposition d = D({"3", "3", "5"});
  const int three = D({"3"}).groups[0];
  const int cands[] = {three, three, D({"5"}).groups[0]};
  const auto q = net.MpnQ(*Latents(), RandomState(rng), d, cands);
  CHECK(q[0] == q[1]);
}

TEST_CASE("chosen moves are always legal") {
  CqlLearner learner(Latents(), SmallConfig(), SmallTraining());
  const ActionCatalog& catalog = Catalog();
  for (double eps : {0.0, 0.5, 1.0}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(seed);
      GameState state = GameState::Deal(rng);
      while (!state.IsTerminal()) {
        const Observation obs = state.Observe(state.to_act());
        const Decision d = learner.Decide(obs, eps, rng);
        const std::vector<int> legal = obs.LegalMoveIndices();
        const int index = catalog.IndexOf(d.move);
        REQUIRE(std::find(legal.begin(), legal.end(), index) != legal.end());
        // The move comes from the chosen decomposition, or is a pass.
        const auto& groups = d.fine->chosen().groups;
        CHECK((index == ActionCatalog::kPassIndex ||
               std::find(groups.begin(), groups.end(), index) != groups.end()));
        CHECK(IsValidDecomposition(d.fine->chosen(), obs.own_hand));
        CHECK(obs.incumbent.has_value() ==
              (d.fine->candidates.front() == ActionCatalog::kPassIndex));
        state = state.Apply(d.move);
      }
    }
  }
}

TEST_CASE("replay stores paired stage transitions") {
  CqlLearner learner(Latents(), SmallConfig(), SmallTraining());
  std::int64_t steps = 0;
  const GameState end = PlayLearningGame(learner, 11, &steps);
  const ReplayBuffer& buffer = learner.buffer();
  REQUIRE(buffer.size() == 2 * steps);
  for (int i = 0; i < buffer.size(); i += 2) {
    const Transition& c = buffer.at(i);
    const Transition& f = buffer.at(i + 1);
    CHECK(c.stage == Stage::kCombination);
    CHECK(c.reward == 0.0);
    CHECK(c.next_fine == f.fine);
    CHECK(f.fine->parent == c.combination);
    CHECK(f.fine->decomposition == c.action);
    CHECK(f.stage == Stage::kFine);
    if (i + 2 < buffer.size()) {
      CHECK(f.reward == 0.0);
      CHECK(f.next_combination == buffer.at(i + 2).combination);
    } else {
      CHECK(f.terminal());
      CHECK(f.reward == end.Rewards()[SeatIndex(Seat::kLandlord)]);
    }
  }
}

TEST_CASE("replay buffer is a bounded FIFO") {
  ReplayBuffer buffer(3);
  std::mt19937_64 rng(0);
  CHECK_THROWS_AS(buffer.Sample(1, rng), InsufficientBufferError);
  for (int i = 0; i < 5; ++i) {
    Transition t;
    t.action = i;
    buffer.Add(t);
  }
  CHECK(buffer.size() == 3);
  CHECK(buffer.at(0).action == 2);
  CHECK(buffer.at(2).action == 4);
  CHECK_THROWS_AS(buffer.Sample(4, rng), InsufficientBufferError);
  for (int i = 0; i < 20; ++i) {
    for (const Transition* t : buffer.Sample(3, rng)) CHECK(t->action >= 2);
  }
  CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);

  CqlLearner learner(Latents(), SmallConfig(), SmallTraining());
  CHECK_THROWS_AS(learner.TrainStep(rng), InsufficientBufferError);
}

TEST_CASE("epsilon schedule") {
  TrainingConfig tc;
  CHECK(EpsilonAt(tc, 0) == 1.0);
  CHECK(EpsilonAt(tc, 50000) == doctest::Approx(0.525));
  CHECK(EpsilonAt(tc, 100000) == doctest::Approx(0.05));
  CHECK(EpsilonAt(tc, 1000000) == doctest::Approx(0.05));
}

double Loss(CqlNetwork& net, const nn::RowVector& s, const Decomposition& d, int cand,
            double y, bool fine) {
  double q;
  if (fine) {
    const int c[] = {cand};
    q = net.MpnQ(*Latents(), s, d, c)[0];
  } else {
    q = net.DpnQ(*Latents(), s, std::span(&d, 1))[0];
  }
  return (q - y) * (q - y);
}

TEST_CASE("accumulated gradients match finite differences") {
  std::mt19937_64 rng(9);
  const Decomposition d = D({"3", "55", "789TJ", "QQQ"});
  const int cand = D({"55"}).groups[0];
  const nn::RowVector s = RandomState(rng);
  for (bool fine : {false, true}) {
    CqlNetwork net(Latents()->dim(), kStateFeatureSize, SmallConfig(21));
    const nn::ParameterList params = net.Parameters();
    nn::ZeroGrad(params);
    if (fine) {
      net.AccumulateMpn(*Latents(), s, d, cand, 0.7, 1.0);
    } else {
      net.AccumulateDpn(*Latents(), s, d, 0.7, 1.0);
    }
    int checked = 0;
    for (nn::Parameter* p : params) {
      std::uniform_int_distribution<int> r(0, static_cast<int>(p->value.rows()) - 1);
      std::uniform_int_distribution<int> c(0, static_cast<int>(p->value.cols()) - 1);
      for (int k = 0; k < 3; ++k) {
        const int i = r(rng), j = c(rng);
        const double orig = p->value(i, j);
        const double h = 1e-6;
        p->value(i, j) = orig + h;
        const double up = Loss(net, s, d, cand, 0.7, fine);
        p->value(i, j) = orig - h;
        const double down = Loss(net, s, d, cand, 0.7, fine);
        p->value(i, j) = orig;
        const double numeric = (up - down) / (2 * h);
        CHECK_MESSAGE(std::abs(numeric - p->grad(i, j)) <=
                          1e-5 * std::max({1.0, std::abs(numeric)}),
                      p->name << "(" << i << "," << j << ")");
        ++checked;
      }
    }
    CHECK(checked > 20);
  }
}

TEST_CASE("training fits terminal rewards") {
  TrainingConfig tc = SmallTraining();
  tc.batch_size = 2;
  CqlLearner learner(Latents(), SmallConfig(), tc);
  std::mt19937_64 rng(4);
  auto c = std::make_shared<CombinationContext>();
  c->state = RandomState(rng);
  c->decompositions = {D({"3", "44"})};
  auto f = std::make_shared<FineContext>();
  f->parent = c;
  f->candidates = {D({"3"}).groups[0], D({"44"}).groups[0]};
  learner.buffer().Add(Transition{Stage::kFine, nullptr, f, 0, 1.0, nullptr, nullptr});
  learner.buffer().Add(Transition{Stage::kFine, nullptr, f, 1, -1.0, nullptr, nullptr});
  double first = 0, last = 0;
  for (int step = 0; step < 400; ++step) {
    const double loss = learner.TrainStep(rng);
    if (step == 0) first = loss;
    last = loss;
  }
  CHECK(last < 0.01 * first);
  CHECK(learner.OnlineQ(learner.buffer().at(0)) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(learner.OnlineQ(learner.buffer().at(1)) == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("train loop runs epochs and evaluates") {
  std::vector<std::unique_ptr<CqlLearner>> learners;
  learners.push_back(std::make_unique<CqlLearner>(Latents(), SmallConfig(), SmallTraining()));
  std::vector<EpochRecord> seen;
  const TrainingResult result = TrainCql(
      {Seat::kLandlord}, [](Seat) { return std::make_unique<RhcpAgent>(); }, learners,
      [&](const EpochRecord& r) { seen.push_back(r); });
  REQUIRE(result.curve.size() == 2);
  CHECK(seen.size() == 2);
  CHECK(result.curve[0].train_steps == 40);
  CHECK(result.curve[1].train_steps == 80);
  CHECK(result.curve[1].env_steps >= 80 * 2);
  CHECK(result.curve[0].epsilon > result.curve[1].epsilon);
  REQUIRE(result.final_winrates.size() == 1);
  CHECK(result.final_winrates[0] >= 0.0);
  CHECK(result.final_winrates[0] <= 1.0);
}

TEST_CASE("self-play trains every seat") {
  std::vector<std::unique_ptr<CqlLearner>> learners;
  for (int i = 0; i < 3; ++i) {
    learners.push_back(
        std::make_unique<CqlLearner>(Latents(), SmallConfig(10 + i), SmallTraining()));
  }
  const TrainingResult result =
      TrainCql({Seat::kLandlord, Seat::kPeasantDown, Seat::kPeasantUp},
               [](Seat) { return std::make_unique<RhcpAgent>(); }, learners);
  CHECK(result.final_winrates.size() == 3);
  for (const auto& l : learners) CHECK(l->buffer().size() > 0);
}

TEST_CASE("checkpoint round trip") {
  GroupAutoencoder encoder;
  CqlLearner learner(std::make_shared<LatentTable>(encoder), SmallConfig(), SmallTraining());
  const auto path =
      (std::filesystem::temp_directory_path() / "ddz_cql_checkpoint.bin").string();
  SaveCheckpoint(path, encoder, learner);
  LoadedCheckpoint loaded = LoadCheckpoint(path);
  std::mt19937_64 rng(3);
  const nn::RowVector s = RandomState(rng);
  const std::vector<Decomposition> ds = {D({"3", "44"}), D({"3", "4", "4"})};
  CHECK(loaded.learner->online().DpnQ(loaded.learner->latents(), s, ds) ==
        learner.online().DpnQ(learner.latents(), s, ds));
  CHECK(loaded.learner->config().fc1_widths == learner.config().fc1_widths);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
  CHECK_THROWS(LoadCheckpoint(path));
}

}  // namespace
}  // namespace ddz
