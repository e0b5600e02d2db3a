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

#include "ddz/features.h"

#include <algorithm>
#include <numeric>

#include "ddz/movegen.h"

namespace ddz {

HandEncoding EncodeHand(const CardMultiset& cards) {
  HandEncoding out{};
  for (Rank r : kAllRanks) {
    for (int c = 0; c < cards.Count(r); ++c) out[RankIndex(r) * kSlotsPerRank + c] = 1.0;
  }
  return out;
}

CardMultiset DecodeHand(const double* values) {
  std::array<int, kNumRanks> counts{};
  for (int r = 0; r < kNumRanks; ++r) {
    int c = 0;
    while (c < kSlotsPerRank && values[r * kSlotsPerRank + c] > 0.5) ++c;
    for (int k = c; k < kSlotsPerRank; ++k) {
      if (values[r * kSlotsPerRank + k] > 0.5) {
        throw CardError("slot pattern is not a thermometer code");
      }
    }
    counts[r] = c;
  }
  return CardMultiset::FromCounts(counts);
}

CardMultiset DecodeHand(const HandEncoding& values) { return DecodeHand(values.data()); }

std::array<double, kBeliefSize> InferBelief(const Observation& obs) {
  std::array<double, kBeliefSize> out{};
  const int prev = obs.hand_sizes[SeatIndex(PrevSeat(obs.seat))];
  const int next = obs.hand_sizes[SeatIndex(NextSeat(obs.seat))];
  if (prev + next == 0) return out;
  const double p_prev = static_cast<double>(prev) / (prev + next);
  const double p_next = static_cast<double>(next) / (prev + next);
  const CardMultiset unseen = obs.Unseen();
  for (Rank r : kAllRanks) {
    for (int c = 0; c < unseen.Count(r); ++c) {
      out[RankIndex(r) * kSlotsPerRank + c] = p_prev;
      out[kHandEncodingSize + RankIndex(r) * kSlotsPerRank + c] = p_next;
    }
  }
  return out;
}

namespace {

constexpr int kRankPositions = kNumRanks;

}  // namespace

GroupAutoencoder::GroupAutoencoder(AutoencoderConfig config)
    : config_(config), pool_(config.channels, kRankPositions, 2, 1, 1) {
  std::mt19937_64 rng(config_.seed);
  for (int b = 0; b < kBranches; ++b) {
    conv_[b] = nn::Conv1d(1, kHandEncodingSize, config_.channels, b + 1, kSlotsPerRank,
                          "encoder.conv" + std::to_string(b + 1), rng);
  }
  to_latent_ = nn::Dense(kBranches * pool_.out_size(), config_.latent, "encoder.fc", rng);
  from_latent_ = nn::Dense(config_.latent, kHandEncodingSize, "decoder.fc", rng);
}

nn::Matrix GroupAutoencoder::EncodeImpl(const nn::Matrix& x, Cache* cache) const {
  std::array<nn::Matrix, kBranches> pooled;
  std::vector<const nn::Matrix*> parts;
  for (int b = 0; b < kBranches; ++b) {
    pooled[b] = pool_.Forward(
        nn::Relu::Forward(conv_[b].Forward(x, cache ? &cache->conv[b] : nullptr),
                          cache ? &cache->relu[b] : nullptr));
    parts.push_back(&pooled[b]);
  }
  return to_latent_.Forward(nn::ConcatColumns(parts), cache ? &cache->to_latent : nullptr);
}

nn::Matrix GroupAutoencoder::Encode(const nn::Matrix& x) const { return EncodeImpl(x, nullptr); }

nn::Matrix GroupAutoencoder::Decode(const nn::Matrix& latent) const {
  return from_latent_.Forward(latent);
}

nn::RowVector GroupAutoencoder::EncodeGroup(const CardMultiset& cards) const {
  const HandEncoding e = EncodeHand(cards);
  nn::Matrix x(1, kHandEncodingSize);
  std::copy(e.begin(), e.end(), x.data());
  return Encode(x).row(0);
}

CardMultiset GroupAutoencoder::Reconstruct(const CardMultiset& cards) const {
  nn::Matrix latent(1, config_.latent);
  latent.row(0) = EncodeGroup(cards);
  const nn::Matrix y = Decode(latent);
  return DecodeHand(y.data());
}

nn::Matrix GroupAutoencoder::BranchActivations(int branch, const nn::Matrix& x) const {
  return nn::Relu::Forward(conv_.at(branch).Forward(x));
}

void GroupAutoencoder::SetDetectorKernels() {
  for (int b = 0; b < kBranches; ++b) {
    conv_[b].weight().value.setOnes();
    conv_[b].bias().value.setConstant(-static_cast<double>(b));
  }
}

double GroupAutoencoder::TrainEpoch(const nn::Matrix& rows, std::mt19937_64& rng) {
  if (!adam_) {
    adam_ = std::make_unique<nn::Adam>(Parameters(),
                                       nn::AdamConfig{.learning_rate = config_.learning_rate});
  }
  std::vector<int> order(rows.rows());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const nn::ParameterList params = Parameters();
  double total = 0;
  for (size_t start = 0; start < order.size(); start += config_.batch_size) {
    const size_t end = std::min(order.size(), start + config_.batch_size);
    nn::Matrix x(end - start, kHandEncodingSize);
    for (size_t i = start; i < end; ++i) x.row(i - start) = rows.row(order[i]);
    Cache cache;
    const nn::Matrix latent = EncodeImpl(x, &cache);
    const nn::Matrix y = from_latent_.Forward(latent, &cache.from_latent);
    const nn::Matrix diff = y - x;
    const double n = static_cast<double>(x.rows());
    total += diff.squaredNorm();
    nn::ZeroGrad(params);
    const nn::Matrix d_latent = from_latent_.Backward(cache.from_latent, diff * (2.0 / n));
    const nn::Matrix d_concat = to_latent_.Backward(cache.to_latent, d_latent);
    const std::vector<nn::Matrix> d_pooled = nn::SplitColumns(
        d_concat, std::vector<int>(kBranches, pool_.out_size()));
    for (int b = 0; b < kBranches; ++b) {
      conv_[b].Backward(cache.conv[b],
                        nn::Relu::Backward(cache.relu[b], pool_.Backward({}, d_pooled[b])));
    }
    adam_->Step();
  }
  return total / static_cast<double>(rows.rows());
}

double GroupAutoencoder::Accuracy(const nn::Matrix& rows) const {
  const nn::Matrix y = Decode(Encode(rows));
  int exact = 0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    bool ok = true;
    for (Eigen::Index j = 0; j < rows.cols() && ok; ++j) {
      ok = (y(i, j) > 0.5) == (rows(i, j) > 0.5);
    }
    exact += ok;
  }
  return static_cast<double>(exact) / static_cast<double>(rows.rows());
}

PretrainReport GroupAutoencoder::Pretrain(
    const std::function<void(int, double, double)>& on_epoch) {
  const nn::Matrix rows = CatalogEncodings();
  std::mt19937_64 rng(config_.seed + 1);
  PretrainReport report;
  for (int epoch = 1; epoch <= config_.max_epochs; ++epoch) {
    report.final_loss = TrainEpoch(rows, rng);
    report.accuracy = Accuracy(rows);
    report.epochs = epoch;
    if (on_epoch) on_epoch(epoch, report.final_loss, report.accuracy);
    if (report.accuracy >= config_.stop_accuracy) break;
  }
  if (report.accuracy < config_.target_accuracy) {
    throw NonConvergenceError("auto-encoder reached only " +
                              std::to_string(report.accuracy) + " exact reconstruction");
  }
  return report;
}

nn::ParameterList GroupAutoencoder::Parameters() {
  nn::ParameterList out;
  for (nn::Conv1d& c : conv_) {
    for (nn::Parameter* p : c.Parameters()) out.push_back(p);
  }
  for (nn::Parameter* p : to_latent_.Parameters()) out.push_back(p);
  for (nn::Parameter* p : from_latent_.Parameters()) out.push_back(p);
  return out;
}

void GroupAutoencoder::Save(const std::string& path) { nn::SaveParameters(Parameters(), path); }

void GroupAutoencoder::Load(const std::string& path) {
  nn::LoadParameters(Parameters(), path);
  adam_.reset();
}

nn::Matrix CatalogEncodings() {
  const ActionCatalog& catalog = Catalog();
  nn::Matrix rows = nn::Matrix::Zero(catalog.size(), kHandEncodingSize);
  for (int i = 1; i < catalog.size(); ++i) {
    const HandEncoding e = EncodeHand(catalog.at(i).cards());
    std::copy(e.begin(), e.end(), rows.row(i).data());
  }
  return rows;
}

LatentTable::LatentTable(const GroupAutoencoder& encoder)
    : latents_(encoder.Encode(CatalogEncodings())) {}

nn::RowVector StateFeatures(const Observation& obs, const LatentTable& latents) {
  const int dim = latents.dim();
  nn::RowVector out(kHandEncodingSize + kBeliefSize + 2 * dim);
  const HandEncoding hand = EncodeHand(obs.own_hand);
  std::copy(hand.begin(), hand.end(), out.data());
  const auto belief = InferBelief(obs);
  std::copy(belief.begin(), belief.end(), out.data() + kHandEncodingSize);
  const ActionCatalog& catalog = Catalog();
  auto latent_of = [&](const std::optional<Move>& m) {
    return latents.row(m ? catalog.IndexOf(*m) : ActionCatalog::kPassIndex);
  };
  out.segment(kHandEncodingSize + kBeliefSize, dim) = latent_of(obs.prev_move);
  out.segment(kHandEncodingSize + kBeliefSize + dim, dim) = latent_of(obs.next_move);
  return out;
}

}  // namespace ddz
