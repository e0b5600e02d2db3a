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

// Combinational Q-learning. A turn is split into two decisions: pick one
// decomposition of the hand (DPN), then pick a move among its groups (MPN).
// Groups are embedded by a frozen, pretrained auto-encoder and a shared
// residual stack (FC1); a decomposition's global feature is the element-wise
// maximum of its groups' features.

#ifndef DDZ_CQL_H_
#define DDZ_CQL_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddz/agent.h"
#include "ddz/decomp.h"
#include "ddz/features.h"
#include "ddz/neural.h"

namespace ddz {

struct CqlConfig {
  std::vector<int> fc1_widths = {256, 512, 1024};
  std::vector<int> head_widths = {512, 256, 128};
  int sampling_limit = kDefaultSampleLimit;
  double gamma = 1.0;
  double learning_rate = 1e-4;
  std::uint64_t seed = 1;
};

// Parameters of one Q network: FC1 plus the DPN and MPN heads.
class CqlNetwork {
 public:
  CqlNetwork(int latent_dim, int state_dim, const CqlConfig& config);

  // Q_c for every decomposition.
  std::vector<double> DpnQ(const LatentTable& latents, const nn::RowVector& state,
                           std::span<const Decomposition> decompositions) const;
  // Q_f for every candidate (catalog indices; 0 is Pass) given the chosen
  // decomposition.
  std::vector<double> MpnQ(const LatentTable& latents, const nn::RowVector& state,
                           const Decomposition& decomposition,
                           std::span<const int> candidates) const;

  // Adds the gradient of scale * (Q - target)^2 for one chosen action and
  // returns Q.
  double AccumulateDpn(const LatentTable& latents, const nn::RowVector& state,
                       const Decomposition& decomposition, double target, double scale);
  double AccumulateMpn(const LatentTable& latents, const nn::RowVector& state,
                       const Decomposition& decomposition, int candidate, double target,
                       double scale);

  // Per-group FC1 features, one row per catalog index.
  nn::Matrix GroupFeatures(const LatentTable& latents, std::span<const int> indices) const;

  nn::ParameterList Parameters();
  int feature_dim() const { return fc1_.out(); }

 private:
  // Residual stack, ReLU, then a linear map to one value.
  struct Head {
    nn::ResidualStack stack;
    nn::Dense out;
    struct Cache {
      nn::ResidualStack::Cache stack;
      nn::Relu::Cache relu;
      nn::Dense::Cache out;
    };
    nn::Matrix Forward(const nn::Matrix& x, Cache* cache) const;
    nn::Matrix Backward(const Cache& cache, const nn::Matrix& dy);
  };
  struct FeatureCache {
    nn::ResidualStack::Cache stack;
    nn::Relu::Cache relu;
  };
  nn::Matrix Features(const LatentTable& latents, std::span<const int> indices,
                      FeatureCache* cache) const;

  nn::ResidualStack fc1_;
  Head dpn_, mpn_;
  int state_dim_;
};

enum class Stage { kCombination, kFine };

// What the agent saw at the combination stage.
struct CombinationContext {
  nn::RowVector state;
  std::vector<Decomposition> decompositions;
};

// The fine stage: the chosen decomposition and the moves it allows.
struct FineContext {
  std::shared_ptr<const CombinationContext> parent;
  int decomposition = 0;
  std::vector<int> candidates;  // Catalog indices; 0 is Pass.

  const Decomposition& chosen() const { return parent->decompositions[decomposition]; }
};

// One replay item. A combination item has reward 0 and its own fine stage as
// successor; a fine item's successor is the agent's next combination stage,
// or none when the game ended.
struct Transition {
  Stage stage = Stage::kCombination;
  std::shared_ptr<const CombinationContext> combination;
  std::shared_ptr<const FineContext> fine;
  int action = 0;
  double reward = 0;
  std::shared_ptr<const FineContext> next_fine;
  std::shared_ptr<const CombinationContext> next_combination;

  bool terminal() const { return !next_fine && !next_combination; }
};

class InsufficientBufferError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// FIFO ring with uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);
  void Add(Transition t);
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  const Transition& at(int i) const { return items_[i]; }
  std::vector<const Transition*> Sample(int batch, std::mt19937_64& rng) const;

 private:
  int capacity_;
  std::deque<Transition> items_;
};

struct TrainingConfig {
  int batch_size = 8;
  // Parameter updates per epoch.
  int steps_per_epoch = 2500;
  // Environment steps per parameter update.
  int update_frequency = 4;
  int memory = 3000;
  int epochs = 10;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_anneal_epochs = 10;
  int target_sync_period = 500;
  int eval_episodes = 50;
  int final_eval_episodes = 200;
  std::uint64_t seed = 1;
};

// Linear in environment steps from epsilon_start to epsilon_end over the
// first epsilon_anneal_epochs epochs, then constant.
double EpsilonAt(const TrainingConfig& config, std::int64_t env_step);

struct Decision {
  Move move = Move::Pass();
  std::shared_ptr<const CombinationContext> combination;
  std::shared_ptr<const FineContext> fine;
  int combination_action = 0;
  int fine_action = 0;
};

// Online and target networks, the replay buffer and the optimizer.
class CqlLearner {
 public:
  CqlLearner(std::shared_ptr<const LatentTable> latents, CqlConfig config,
             TrainingConfig training = {});

  // Two-stage epsilon-greedy choice using the online network.
  Decision Decide(const Observation& obs, double epsilon, std::mt19937_64& rng) const;

  // Double-Q regression target: the online network picks the successor's
  // action and the target network scores it.
  double Target(const Transition& t) const;
  // Same backup using the target network for both roles.
  double MaxTarget(const Transition& t) const;
  // Q of the transition's own action under the online network.
  double OnlineQ(const Transition& t) const;

  // One minibatch update; returns the mean squared error. Syncs the target
  // network every target_sync_period updates.
  double TrainStep(std::mt19937_64& rng);
  void SyncTarget();

  ReplayBuffer& buffer() { return buffer_; }
  const LatentTable& latents() const { return *latents_; }
  std::shared_ptr<const LatentTable> shared_latents() const { return latents_; }
  CqlNetwork& online() { return online_; }
  CqlNetwork& target() { return target_; }
  const CqlNetwork& online() const { return online_; }
  const CqlConfig& config() const { return config_; }
  const TrainingConfig& training() const { return training_; }
  std::int64_t train_steps() const { return train_steps_; }

 private:
  double StageValue(const CqlNetwork& chooser, const CqlNetwork& evaluator,
                    const Transition& t) const;

  std::shared_ptr<const LatentTable> latents_;
  CqlConfig config_;
  TrainingConfig training_;
  CqlNetwork online_, target_;
  std::unique_ptr<nn::Adam> adam_;
  ReplayBuffer buffer_;
  std::int64_t train_steps_ = 0;
};

// Plays with a learner's online network. In learning mode it stores
// transitions, counts environment steps and trains every update_frequency
// steps.
class CqlAgent : public Agent {
 public:
  CqlAgent(CqlLearner* learner, bool learning, double epsilon = 0.0);

  Move Act(const Observation& obs, std::mt19937_64& rng) override;
  void GameOver(const Observation& obs, int reward) override;
  std::string name() const override { return "cql"; }

  void set_epsilon(double e) { epsilon_ = e; }
  void set_learning(bool learning) { learning_ = learning; }
  // Called after every parameter update made by this agent.
  void set_after_update(std::function<void()> fn) { after_update_ = std::move(fn); }
  // Use the training schedule for epsilon (learning mode).
  void set_scheduled(bool s) { scheduled_ = s; }
  std::int64_t env_steps() const { return env_steps_; }
  double last_loss() const { return last_loss_; }
  // Mean loss of the train steps since the last call.
  double TakeMeanLoss();

 private:
  CqlLearner* learner_;
  bool learning_;
  bool scheduled_ = true;
  double epsilon_;
  std::int64_t env_steps_ = 0;
  std::optional<Transition> pending_combination_, pending_fine_;
  std::mt19937_64 train_rng_;
  std::function<void()> after_update_;
  double last_loss_ = 0, loss_sum_ = 0;
  int loss_count_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  std::int64_t env_steps = 0;
  std::int64_t train_steps = 0;
  double epsilon = 0;
  double loss = 0;
  std::vector<double> winrates;  // One per learning seat.
  int eval_episodes = 0;
  double seconds = 0;
};

struct TrainingResult {
  std::vector<EpochRecord> curve;
  std::vector<double> final_winrates;
  int final_episodes = 0;
};

// Deal seeds of the evaluation after `epoch` and of the final evaluation.
std::uint64_t EpochEvalSeed(const TrainingConfig& config, int epoch);
std::uint64_t FinalEvalSeed(const TrainingConfig& config);

// Factory for the seats that do not learn.
using OpponentFactory = std::function<std::unique_ptr<Agent>(Seat)>;

// Trains one learner per seat in `learning_seats` against `opponents` in the
// other seats. Epochs are counted in the first learner's updates. After each
// epoch every learner plays greedily against `opponents` alone.
TrainingResult TrainCql(const std::vector<Seat>& learning_seats,
                        const OpponentFactory& opponents,
                        std::vector<std::unique_ptr<CqlLearner>>& learners,
                        const std::function<void(const EpochRecord&)>& on_epoch = {});

// Winrate of `seat` played by `agent` against `opponents` over `episodes`
// games dealt from `seed`.
double EvaluateSeat(Agent& agent, Seat seat, const OpponentFactory& opponents,
                    int episodes, std::uint64_t seed);

// Checkpoints hold the encoder and online network parameters plus a JSON
// sidecar (path + ".json") with the widths needed to rebuild them.
void SaveCheckpoint(const std::string& path, GroupAutoencoder& encoder,
                    CqlLearner& learner);
struct LoadedCheckpoint {
  std::unique_ptr<GroupAutoencoder> encoder;
  std::unique_ptr<CqlLearner> learner;
};
LoadedCheckpoint LoadCheckpoint(const std::string& path);

}  // namespace ddz

#endif  // DDZ_CQL_H_
