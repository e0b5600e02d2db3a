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

#ifndef DDZ_FEATURES_H_
#define DDZ_FEATURES_H_

#include <array>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddz/cards.h"
#include "ddz/engine.h"
#include "ddz/neural.h"

namespace ddz {

inline constexpr int kSlotsPerRank = 4;
inline constexpr int kHandEncodingSize = kNumRanks * kSlotsPerRank;  // 60
inline constexpr int kBeliefSize = 2 * kHandEncodingSize;            // 120
inline constexpr int kLatentSize = 256;
inline constexpr int kStateFeatureSize =
    kHandEncodingSize + kBeliefSize + 2 * kLatentSize;  // 692

using HandEncoding = std::array<double, kHandEncodingSize>;

// Rank r with c copies sets slots 4r .. 4r+c-1 (a thermometer code).
HandEncoding EncodeHand(const CardMultiset& cards);
// Inverse of EncodeHand; slots above 0.5 count as set. Throws CardError for
// a non-thermometer pattern.
CardMultiset DecodeHand(const double* values);
CardMultiset DecodeHand(const HandEncoding& values);

// Probabilities that each unseen card instance is in the previous (first
// block) or next (second block) seat's hand, split in proportion to their
// hand sizes. Unseen copies of a rank occupy its lowest slots.
std::array<double, kBeliefSize> InferBelief(const Observation& obs);

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AutoencoderConfig {
  int channels = 8;  // Per convolution branch.
  int latent = kLatentSize;
  int max_epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-3;
  // Training stops early once exact reconstruction reaches this fraction.
  double stop_accuracy = 1.0;
  // Pretrain throws NonConvergenceError below this fraction.
  double target_accuracy = 0.99;
  std::uint64_t seed = 1;
};

struct PretrainReport {
  int epochs = 0;
  double accuracy = 0;
  double final_loss = 0;
};

// Card-group auto-encoder. The encoder runs four convolution branches over
// the 60-slot encoding, with kernels spanning 1..4 count slots and stride 4
// (one rank), each followed by ReLU and average pooling over neighbouring
// ranks; the branches are concatenated and mapped linearly to the latent.
// The decoder maps the latent linearly back to 60 values.
class GroupAutoencoder {
 public:
  static constexpr int kBranches = 4;

  explicit GroupAutoencoder(AutoencoderConfig config = {});

  // Rows are 60-slot encodings.
  nn::Matrix Encode(const nn::Matrix& x) const;
  nn::Matrix Decode(const nn::Matrix& latent) const;
  nn::RowVector EncodeGroup(const CardMultiset& cards) const;
  CardMultiset Reconstruct(const CardMultiset& cards) const;

  // Post-ReLU activations of branch `branch` (kernel branch + 1), shape
  // [n, channels * 15].
  nn::Matrix BranchActivations(int branch, const nn::Matrix& x) const;
  // Sets every kernel of branch c to ones with bias -(c-1), so a unit fires
  // exactly on ranks holding at least c copies.
  void SetDetectorKernels();

  // One pass of minibatch training over `rows`; returns the mean loss.
  double TrainEpoch(const nn::Matrix& rows, std::mt19937_64& rng);
  // Fraction of rows decoded exactly.
  double Accuracy(const nn::Matrix& rows) const;
  // Trains on every catalog group plus the empty group.
  PretrainReport Pretrain(const std::function<void(int, double, double)>& on_epoch = {});

  const AutoencoderConfig& config() const { return config_; }
  nn::ParameterList Parameters();
  void Save(const std::string& path);
  void Load(const std::string& path);

 private:
  struct Cache {
    std::array<nn::Conv1d::Cache, kBranches> conv;
    std::array<nn::Relu::Cache, kBranches> relu;
    nn::Dense::Cache to_latent, from_latent;
  };
  nn::Matrix EncodeImpl(const nn::Matrix& x, Cache* cache) const;

  AutoencoderConfig config_;
  std::array<nn::Conv1d, kBranches> conv_;
  nn::AvgPool1d pool_;
  nn::Dense to_latent_, from_latent_;
  std::unique_ptr<nn::Adam> adam_;
};

// Encodings of every catalog group (row i = catalog index i; Pass is the
// all-zero row).
nn::Matrix CatalogEncodings();

// Latents of every catalog entry under a fixed encoder.
class LatentTable {
 public:
  LatentTable() = default;
  explicit LatentTable(const GroupAutoencoder& encoder);

  const nn::Matrix& latents() const { return latents_; }
  auto row(int catalog_index) const { return latents_.row(catalog_index); }
  int dim() const { return static_cast<int>(latents_.cols()); }

 private:
  nn::Matrix latents_;
};

// Own hand (60), belief (120), then the latents of the previous and next
// seats' latest moves (a missing move counts as Pass).
nn::RowVector StateFeatures(const Observation& obs, const LatentTable& latents);

}  // namespace ddz

#endif  // DDZ_FEATURES_H_
