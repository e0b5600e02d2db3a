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
#include <chrono>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ddz {
namespace {

using nn::Matrix;
using nn::RowVector;

std::vector<int> SortedUnique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

int PositionOf(const std::vector<int>& sorted, int value) {
  return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), value) -
                          sorted.begin());
}

Matrix GatherRows(const Matrix& m, const std::vector<int>& sorted,
                  const std::vector<int>& values) {
  Matrix out(values.size(), m.cols());
  for (size_t i = 0; i < values.size(); ++i) out.row(i) = m.row(PositionOf(sorted, values[i]));
  return out;
}

int ArgMax(const std::vector<double>& q) {
  return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

void CheckDecomposition(const Decomposition& d) {
  if (d.groups.empty()) throw std::invalid_argument("empty decomposition");
}

std::vector<double> Column(const Matrix& m) {
  std::vector<double> out(m.rows());
  for (int i = 0; i < m.rows(); ++i) out[i] = m(i, 0);
  return out;
}

}  // namespace

CqlNetwork::CqlNetwork(int latent_dim, int state_dim, const CqlConfig& config)
    : state_dim_(state_dim) {
  if (config.fc1_widths.empty()) throw std::invalid_argument("fc1_widths is empty");
  std::mt19937_64 rng(config.seed);
  fc1_ = nn::ResidualStack(latent_dim, config.fc1_widths, "fc1", rng);
  const int w = fc1_.out();
  auto build = [&](Head& head, int in, const std::string& name) {
    head.stack = nn::ResidualStack(in, config.head_widths, name, rng);
    head.out = nn::Dense(head.stack.out(), 1, name + "/out", rng);
  };
  build(dpn_, w + state_dim, "dpn");
  build(mpn_, 2 * w + state_dim, "mpn");
}

Matrix CqlNetwork::Head::Forward(const Matrix& x, Cache* cache) const {
  const Matrix h = nn::Relu::Forward(stack.Forward(x, cache ? &cache->stack : nullptr),
                                     cache ? &cache->relu : nullptr);
  return out.Forward(h, cache ? &cache->out : nullptr);
}

Matrix CqlNetwork::Head::Backward(const Cache& cache, const Matrix& dy) {
  return stack.Backward(cache.stack, nn::Relu::Backward(cache.relu, out.Backward(cache.out, dy)));
}

Matrix CqlNetwork::Features(const LatentTable& latents, std::span<const int> indices,
                            FeatureCache* cache) const {
  Matrix x(indices.size(), latents.dim());
  for (size_t i = 0; i < indices.size(); ++i) x.row(i) = latents.row(indices[i]);
  Matrix h = fc1_.Forward(x, cache ? &cache->stack : nullptr);
  return nn::Relu::Forward(h, cache ? &cache->relu : nullptr);
}

Matrix CqlNetwork::GroupFeatures(const LatentTable& latents,
                                 std::span<const int> indices) const {
  return Features(latents, indices, nullptr);
}

std::vector<double> CqlNetwork::DpnQ(const LatentTable& latents, const RowVector& state,
                                     std::span<const Decomposition> decompositions) const {
  if (state.cols() != state_dim_) throw nn::ShapeError("state width mismatch");
  if (decompositions.empty()) return {};
  std::vector<int> all;
  for (const Decomposition& d : decompositions) {
    CheckDecomposition(d);
    all.insert(all.end(), d.groups.begin(), d.groups.end());
  }
  const std::vector<int> unique = SortedUnique(std::move(all));
  const Matrix f = Features(latents, unique, nullptr);
  const int w = feature_dim();
  Matrix x(decompositions.size(), w + state_dim_);
  for (size_t i = 0; i < decompositions.size(); ++i) {
    x.row(i).head(w) = nn::SetMaxPool::Forward(GatherRows(f, unique, decompositions[i].groups));
    x.row(i).tail(state_dim_) = state;
  }
  return Column(dpn_.Forward(x, nullptr));
}

std::vector<double> CqlNetwork::MpnQ(const LatentTable& latents, const RowVector& state,
                                     const Decomposition& decomposition,
                                     std::span<const int> candidates) const {
  if (state.cols() != state_dim_) throw nn::ShapeError("state width mismatch");
  CheckDecomposition(decomposition);
  if (candidates.empty()) return {};
  std::vector<int> all = decomposition.groups;
  all.insert(all.end(), candidates.begin(), candidates.end());
  const std::vector<int> unique = SortedUnique(std::move(all));
  const Matrix f = Features(latents, unique, nullptr);
  const int w = feature_dim();
  const RowVector global = nn::SetMaxPool::Forward(GatherRows(f, unique, decomposition.groups));
  Matrix x(candidates.size(), 2 * w + state_dim_);
  for (size_t i = 0; i < candidates.size(); ++i) {
    x.row(i).head(w) = f.row(PositionOf(unique, candidates[i]));
    x.row(i).segment(w, w) = global;
    x.row(i).tail(state_dim_) = state;
  }
  return Column(mpn_.Forward(x, nullptr));
}

double CqlNetwork::AccumulateDpn(const LatentTable& latents, const RowVector& state,
                                 const Decomposition& decomposition, double target,
                                 double scale) {
  CheckDecomposition(decomposition);
  const std::vector<int> unique = SortedUnique(decomposition.groups);
  FeatureCache fc;
  const Matrix f = Features(latents, unique, &fc);
  const int w = feature_dim();
  nn::SetMaxPool::Cache pool;
  Matrix x(1, w + state_dim_);
  x.row(0).head(w) = nn::SetMaxPool::Forward(GatherRows(f, unique, decomposition.groups), &pool);
  x.row(0).tail(state_dim_) = state;
  Head::Cache hc;
  const double q = dpn_.Forward(x, &hc)(0, 0);

  Matrix dq(1, 1);
  dq(0, 0) = 2.0 * scale * (q - target);
  const Matrix dx = dpn_.Backward(hc, dq);
  const Matrix dm = nn::SetMaxPool::Backward(pool, dx.row(0).head(w));
  Matrix df = Matrix::Zero(unique.size(), w);
  for (size_t i = 0; i < decomposition.groups.size(); ++i) {
    df.row(PositionOf(unique, decomposition.groups[i])) += dm.row(i);
  }
  fc1_.Backward(fc.stack, nn::Relu::Backward(fc.relu, df));
  return q;
}

double CqlNetwork::AccumulateMpn(const LatentTable& latents, const RowVector& state,
                                 const Decomposition& decomposition, int candidate,
                                 double target, double scale) {
  CheckDecomposition(decomposition);
  std::vector<int> all = decomposition.groups;
  all.push_back(candidate);
  const std::vector<int> unique = SortedUnique(std::move(all));
  FeatureCache fc;
  const Matrix f = Features(latents, unique, &fc);
  const int w = feature_dim();
  nn::SetMaxPool::Cache pool;
  Matrix x(1, 2 * w + state_dim_);
  x.row(0).head(w) = f.row(PositionOf(unique, candidate));
  x.row(0).segment(w, w) =
      nn::SetMaxPool::Forward(GatherRows(f, unique, decomposition.groups), &pool);
  x.row(0).tail(state_dim_) = state;
  Head::Cache hc;
  const double q = mpn_.Forward(x, &hc)(0, 0);

  Matrix dq(1, 1);
  dq(0, 0) = 2.0 * scale * (q - target);
  const Matrix dx = mpn_.Backward(hc, dq);
  Matrix df = Matrix::Zero(unique.size(), w);
  df.row(PositionOf(unique, candidate)) += dx.row(0).head(w);
  const Matrix dm = nn::SetMaxPool::Backward(pool, dx.row(0).segment(w, w));
  for (size_t i = 0; i < decomposition.groups.size(); ++i) {
    df.row(PositionOf(unique, decomposition.groups[i])) += dm.row(i);
  }
  fc1_.Backward(fc.stack, nn::Relu::Backward(fc.relu, df));
  return q;
}

nn::ParameterList CqlNetwork::Parameters() {
  nn::ParameterList out = fc1_.Parameters();
  for (Head* head : {&dpn_, &mpn_}) {
    for (nn::Parameter* p : head->stack.Parameters()) out.push_back(p);
    for (nn::Parameter* p : head->out.Parameters()) out.push_back(p);
  }
  return out;
}

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayBuffer::Add(Transition t) {
  if (static_cast<int>(items_.size()) == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::vector<const Transition*> ReplayBuffer::Sample(int batch, std::mt19937_64& rng) const {
  if (batch < 1) throw std::invalid_argument("batch must be positive");
  if (size() < batch) {
    throw InsufficientBufferError("replay holds " + std::to_string(size()) +
                                  " transitions, batch needs " + std::to_string(batch));
  }
  std::uniform_int_distribution<int> pick(0, size() - 1);
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (int i = 0; i < batch; ++i) out.push_back(&items_[pick(rng)]);
  return out;
}

double EpsilonAt(const TrainingConfig& config, std::int64_t env_step) {
  const double horizon = static_cast<double>(config.epsilon_anneal_epochs) *
                         config.steps_per_epoch * config.update_frequency;
  if (horizon <= 0) return config.epsilon_end;
  const double t = std::min(1.0, static_cast<double>(env_step) / horizon);
  return config.epsilon_start + t * (config.epsilon_end - config.epsilon_start);
}

CqlLearner::CqlLearner(std::shared_ptr<const LatentTable> latents, CqlConfig config,
                       TrainingConfig training)
    : latents_(std::move(latents)),
      config_(std::move(config)),
      training_(training),
      online_(latents_->dim(), kStateFeatureSize, config_),
      target_(latents_->dim(), kStateFeatureSize, config_),
      buffer_(training.memory) {
  if (config_.sampling_limit < 1) throw std::invalid_argument("sampling_limit must be >= 1");
  if (training_.batch_size < 1 || training_.update_frequency < 1 ||
      training_.target_sync_period < 1 || training_.steps_per_epoch < 1) {
    throw std::invalid_argument("training periods must be positive");
  }
  nn::AdamConfig adam;
  adam.learning_rate = config_.learning_rate;
  adam_ = std::make_unique<nn::Adam>(online_.Parameters(), adam);
  SyncTarget();
}

void CqlLearner::SyncTarget() { nn::CopyValues(online_.Parameters(), target_.Parameters()); }

Decision CqlLearner::Decide(const Observation& obs, double epsilon,
                            std::mt19937_64& rng) const {
  if (obs.own_hand.Empty()) throw std::invalid_argument("no cards to play");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto combination = std::make_shared<CombinationContext>();
  combination->state = StateFeatures(obs, *latents_);
  combination->decompositions =
      SampleDecompositions(obs.own_hand, config_.sampling_limit, rng).decompositions;

  Decision d;
  const int num_decomps = static_cast<int>(combination->decompositions.size());
  if (coin(rng) < epsilon) {
    d.combination_action = std::uniform_int_distribution<int>(0, num_decomps - 1)(rng);
  } else {
    d.combination_action =
        ArgMax(online_.DpnQ(*latents_, combination->state, combination->decompositions));
  }

  auto fine = std::make_shared<FineContext>();
  fine->parent = combination;
  fine->decomposition = d.combination_action;
  const std::optional<CardGroup> incumbent = obs.incumbent_group();
  const ActionCatalog& catalog = Catalog();
  for (int g : SortedUnique(fine->chosen().groups)) {
    if (!incumbent || Beats(catalog.at(g).group(), *incumbent)) fine->candidates.push_back(g);
  }
  if (incumbent) fine->candidates.insert(fine->candidates.begin(), ActionCatalog::kPassIndex);

  if (coin(rng) < epsilon) {
    d.fine_action =
        std::uniform_int_distribution<int>(0, static_cast<int>(fine->candidates.size()) - 1)(rng);
  } else {
    d.fine_action = ArgMax(
        online_.MpnQ(*latents_, combination->state, fine->chosen(), fine->candidates));
  }
  d.move = catalog.at(fine->candidates[d.fine_action]);
  d.combination = std::move(combination);
  d.fine = std::move(fine);
  return d;
}

double CqlLearner::StageValue(const CqlNetwork& chooser, const CqlNetwork& evaluator,
                              const Transition& t) const {
  if (t.next_fine) {
    const FineContext& f = *t.next_fine;
    const RowVector& state = f.parent->state;
    const int best = ArgMax(chooser.MpnQ(*latents_, state, f.chosen(), f.candidates));
    const int pick[] = {f.candidates[best]};
    return evaluator.MpnQ(*latents_, state, f.chosen(), pick)[0];
  }
  if (t.next_combination) {
    const CombinationContext& c = *t.next_combination;
    const int best = ArgMax(chooser.DpnQ(*latents_, c.state, c.decompositions));
    return evaluator.DpnQ(*latents_, c.state,
                          std::span<const Decomposition>(&c.decompositions[best], 1))[0];
  }
  return 0.0;
}

double CqlLearner::Target(const Transition& t) const {
  return t.reward + config_.gamma * StageValue(online_, target_, t);
}

double CqlLearner::MaxTarget(const Transition& t) const {
  return t.reward + config_.gamma * StageValue(target_, target_, t);
}

double CqlLearner::OnlineQ(const Transition& t) const {
  if (t.stage == Stage::kCombination) {
    const CombinationContext& c = *t.combination;
    return online_.DpnQ(*latents_, c.state,
                        std::span<const Decomposition>(&c.decompositions[t.action], 1))[0];
  }
  const FineContext& f = *t.fine;
  const int pick[] = {f.candidates[t.action]};
  return online_.MpnQ(*latents_, f.parent->state, f.chosen(), pick)[0];
}

double CqlLearner::TrainStep(std::mt19937_64& rng) {
  const std::vector<const Transition*> batch = buffer_.Sample(training_.batch_size, rng);
  std::vector<double> targets;
  targets.reserve(batch.size());
  for (const Transition* t : batch) targets.push_back(Target(*t));

  const nn::ParameterList params = online_.Parameters();
  nn::ZeroGrad(params);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    double q;
    if (t.stage == Stage::kCombination) {
      q = online_.AccumulateDpn(*latents_, t.combination->state,
                                t.combination->decompositions[t.action], targets[i], scale);
    } else {
      q = online_.AccumulateMpn(*latents_, t.fine->parent->state, t.fine->chosen(),
                                t.fine->candidates[t.action], targets[i], scale);
    }
    loss += scale * (q - targets[i]) * (q - targets[i]);
  }
  adam_->Step();
  ++train_steps_;
  if (train_steps_ % training_.target_sync_period == 0) SyncTarget();
  return loss;
}

CqlAgent::CqlAgent(CqlLearner* learner, bool learning, double epsilon)
    : learner_(learner),
      learning_(learning),
      epsilon_(epsilon),
      train_rng_(learner->training().seed ^ 0x5eedULL) {}

Move CqlAgent::Act(const Observation& obs, std::mt19937_64& rng) {
  const double eps =
      learning_ && scheduled_ ? EpsilonAt(learner_->training(), env_steps_) : epsilon_;
  Decision d = learner_->Decide(obs, eps, rng);
  if (!learning_) return d.move;

  if (pending_fine_) {
    pending_fine_->next_combination = d.combination;
    learner_->buffer().Add(std::move(*pending_combination_));
    learner_->buffer().Add(std::move(*pending_fine_));
  }
  Transition c;
  c.stage = Stage::kCombination;
  c.combination = d.combination;
  c.action = d.combination_action;
  c.next_fine = d.fine;
  pending_combination_ = std::move(c);
  Transition f;
  f.stage = Stage::kFine;
  f.fine = d.fine;
  f.action = d.fine_action;
  pending_fine_ = std::move(f);

  ++env_steps_;
  const TrainingConfig& tc = learner_->training();
  if (env_steps_ % tc.update_frequency == 0 &&
      learner_->buffer().size() >= tc.batch_size) {
    last_loss_ = learner_->TrainStep(train_rng_);
    loss_sum_ += last_loss_;
    ++loss_count_;
    if (after_update_) after_update_();
  }
  return d.move;
}

void CqlAgent::GameOver(const Observation&, int reward) {
  if (!learning_ || !pending_fine_) return;
  pending_fine_->reward = reward;
  learner_->buffer().Add(std::move(*pending_combination_));
  learner_->buffer().Add(std::move(*pending_fine_));
  pending_combination_.reset();
  pending_fine_.reset();
}

double CqlAgent::TakeMeanLoss() {
  const double mean = loss_count_ ? loss_sum_ / loss_count_ : 0.0;
  loss_sum_ = 0;
  loss_count_ = 0;
  return mean;
}

double EvaluateSeat(Agent& agent, Seat seat, const OpponentFactory& opponents,
                    int episodes, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("episodes must be positive");
  std::array<std::unique_ptr<Agent>, kNumSeats> others;
  SeatAgents seats{};
  for (Seat s : kAllSeats) {
    if (s == seat) {
      seats[SeatIndex(s)] = &agent;
    } else {
      others[SeatIndex(s)] = opponents(s);
      seats[SeatIndex(s)] = others[SeatIndex(s)].get();
    }
  }
  int wins = 0;
  for (int e = 0; e < episodes; ++e) {
    std::mt19937_64 rng(EpisodeSeed(seed, e));
    const GameState end = PlayGame(seats, GameState::Deal(rng), rng);
    if (SameTeam(*end.winner(), seat)) ++wins;
  }
  return static_cast<double>(wins) / episodes;
}

std::uint64_t EpochEvalSeed(const TrainingConfig& config, int epoch) {
  return EpisodeSeed(config.seed ^ 0xe7a1ULL, epoch);
}

std::uint64_t FinalEvalSeed(const TrainingConfig& config) {
  return EpisodeSeed(config.seed ^ 0xf1a1ULL, 0);
}

TrainingResult TrainCql(const std::vector<Seat>& learning_seats,
                        const OpponentFactory& opponents,
                        std::vector<std::unique_ptr<CqlLearner>>& learners,
                        const std::function<void(const EpochRecord&)>& on_epoch) {
  if (learning_seats.empty() || learning_seats.size() != learners.size()) {
    throw std::invalid_argument("one learner per learning seat is required");
  }
  const TrainingConfig& tc = learners[0]->training();
  std::vector<std::unique_ptr<CqlAgent>> agents;
  std::array<std::unique_ptr<Agent>, kNumSeats> others;
  SeatAgents seats{};
  for (size_t i = 0; i < learning_seats.size(); ++i) {
    agents.push_back(std::make_unique<CqlAgent>(learners[i].get(), true));
    Agent*& slot = seats[SeatIndex(learning_seats[i])];
    if (slot) throw std::invalid_argument("duplicate learning seat");
    slot = agents.back().get();
  }
  for (Seat s : kAllSeats) {
    if (!seats[SeatIndex(s)]) {
      others[SeatIndex(s)] = opponents(s);
      seats[SeatIndex(s)] = others[SeatIndex(s)].get();
    }
  }

  TrainingResult result;
  const auto start = std::chrono::steady_clock::now();
  agents[0]->set_after_update([&] {
    const std::int64_t steps = learners[0]->train_steps();
    if (steps % tc.steps_per_epoch != 0) return;
    EpochRecord record;
    record.epoch = static_cast<int>(steps / tc.steps_per_epoch);
    record.env_steps = agents[0]->env_steps();
    record.train_steps = steps;
    record.epsilon = EpsilonAt(tc, agents[0]->env_steps());
    record.loss = agents[0]->TakeMeanLoss();
    record.eval_episodes = tc.eval_episodes;
    for (size_t i = 0; i < learners.size(); ++i) {
      CqlAgent greedy(learners[i].get(), false, 0.0);
      record.winrates.push_back(
          tc.eval_episodes > 0
              ? EvaluateSeat(greedy, learning_seats[i], opponents, tc.eval_episodes,
                             EpochEvalSeed(tc, record.epoch))
              : 0.0);
    }
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_epoch) on_epoch(record);
    result.curve.push_back(std::move(record));
    if (static_cast<int>(result.curve.size()) == tc.epochs) {
      for (auto& a : agents) a->set_learning(false);
    }
  });
  std::uint64_t episode = 0;
  while (static_cast<int>(result.curve.size()) < tc.epochs) {
    std::mt19937_64 rng(EpisodeSeed(tc.seed, episode++));
    PlayGame(seats, GameState::Deal(rng), rng);
  }
  result.final_episodes = tc.final_eval_episodes;
  for (size_t i = 0; i < learners.size(); ++i) {
    CqlAgent greedy(learners[i].get(), false, 0.0);
    result.final_winrates.push_back(
        tc.final_eval_episodes > 0
            ? EvaluateSeat(greedy, learning_seats[i], opponents, tc.final_eval_episodes,
                           FinalEvalSeed(tc))
            : 0.0);
  }
  return result;
}

void SaveCheckpoint(const std::string& path, GroupAutoencoder& encoder, CqlLearner& learner) {
  nn::ParameterList params = encoder.Parameters();
  for (nn::Parameter* p : learner.online().Parameters()) params.push_back(p);
  nn::SaveParameters(params, path);
  nlohmann::json meta;
  meta["encoder_channels"] = encoder.config().channels;
  meta["latent"] = encoder.config().latent;
  meta["fc1_widths"] = learner.config().fc1_widths;
  meta["head_widths"] = learner.config().head_widths;
  meta["sampling_limit"] = learner.config().sampling_limit;
  meta["gamma"] = learner.config().gamma;
  meta["learning_rate"] = learner.config().learning_rate;
  std::ofstream out(path + ".json");
  if (!out) throw std::runtime_error("cannot write " + path + ".json");
  out << meta.dump(2) << "\n";
}

LoadedCheckpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path + ".json");
  if (!in) throw std::runtime_error("cannot read " + path + ".json");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ".json: " + e.what());
  }
  AutoencoderConfig ae;
  ae.channels = meta.at("encoder_channels").get<int>();
  ae.latent = meta.at("latent").get<int>();
  CqlConfig cfg;
  cfg.fc1_widths = meta.at("fc1_widths").get<std::vector<int>>();
  cfg.head_widths = meta.at("head_widths").get<std::vector<int>>();
  cfg.sampling_limit = meta.at("sampling_limit").get<int>();
  cfg.gamma = meta.value("gamma", 1.0);
  cfg.learning_rate = meta.value("learning_rate", cfg.learning_rate);

  LoadedCheckpoint out;
  out.encoder = std::make_unique<GroupAutoencoder>(ae);
  CqlNetwork staging(ae.latent, kStateFeatureSize, cfg);
  nn::ParameterList params = out.encoder->Parameters();
  for (nn::Parameter* p : staging.Parameters()) params.push_back(p);
  nn::LoadParameters(params, path);
  out.learner = std::make_unique<CqlLearner>(std::make_shared<LatentTable>(*out.encoder), cfg);
  nn::CopyValues(staging.Parameters(), out.learner->online().Parameters());
  out.learner->SyncTarget();
  return out;
}

}  // namespace ddz
