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

// Small layers with hand-written reverse-mode gradients. Activations are
// row-major matrices with one row per example. Forward passes are const and
// fill an optional cache; Backward consumes that cache, accumulates parameter
// gradients and returns the input gradient.

#ifndef DDZ_NEURAL_H_
#define DDZ_NEURAL_H_

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddz::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, int rows, int cols)
      : name(std::move(n)), value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}
};

using ParameterList = std::vector<Parameter*>;

void ZeroGrad(const ParameterList& params);
// Copies values (not gradients) between two lists with identical shapes.
void CopyValues(const ParameterList& from, const ParameterList& to);

// y = x W + b, with W stored as in x out.
class Dense {
 public:
  struct Cache {
    Matrix x;
  };

  Dense() = default;
  Dense(int in, int out, const std::string& name, std::mt19937_64& rng);

  Matrix Forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix Backward(const Cache& cache, const Matrix& dy);

  // W = I (in == out) and b = 0.
  void SetIdentity();
  int in() const { return static_cast<int>(w_.value.rows()); }
  int out() const { return static_cast<int>(w_.value.cols()); }
  Parameter& weight() { return w_; }
  Parameter& bias() { return b_; }
  ParameterList Parameters() { return {&w_, &b_}; }

 private:
  Parameter w_, b_;
};

struct Relu {
  struct Cache {
    Matrix y;
  };
  static Matrix Forward(const Matrix& x, Cache* cache = nullptr);
  static Matrix Backward(const Cache& cache, const Matrix& dy);
};

// 1D convolution without padding. Each input row is `in_channels` blocks of
// `length` values; each output row is `out_channels` blocks of out_length().
class Conv1d {
 public:
  struct Cache {
    Matrix x;
  };

  Conv1d() = default;
  Conv1d(int in_channels, int length, int out_channels, int kernel, int stride,
         const std::string& name, std::mt19937_64& rng);

  Matrix Forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix Backward(const Cache& cache, const Matrix& dy);

  int out_length() const { return (length_ - kernel_) / stride_ + 1; }
  int out_channels() const { return out_channels_; }
  int out_size() const { return out_channels_ * out_length(); }
  // Weights are (out_channels) x (in_channels * kernel).
  Parameter& weight() { return w_; }
  Parameter& bias() { return b_; }
  ParameterList Parameters() { return {&w_, &b_}; }

 private:
  int in_channels_ = 0, length_ = 0, out_channels_ = 0, kernel_ = 0, stride_ = 1;
  Parameter w_, b_;
};

// Per-channel average over windows; `pad_end` zeros are appended to each
// channel and count towards the average.
class AvgPool1d {
 public:
  struct Cache {};

  AvgPool1d() = default;
  AvgPool1d(int channels, int length, int window, int stride, int pad_end);

  Matrix Forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix Backward(const Cache& cache, const Matrix& dy) const;

  int out_length() const { return (length_ + pad_end_ - window_) / stride_ + 1; }
  int out_size() const { return channels_ * out_length(); }

 private:
  int channels_ = 0, length_ = 0, window_ = 1, stride_ = 1, pad_end_ = 0;
};

// Element-wise maximum over the rows of a set. Ties go to the lowest row, so
// the result and its gradient do not depend on row order beyond ties.
struct SetMaxPool {
  struct Cache {
    int rows = 0;
    std::vector<int> argmax;
  };
  static RowVector Forward(const Matrix& x, Cache* cache = nullptr);
  static Matrix Backward(const Cache& cache, const RowVector& dy);
};

// Column-wise concatenation of row-aligned blocks and its inverse.
Matrix ConcatColumns(const std::vector<const Matrix*>& parts);
std::vector<Matrix> SplitColumns(const Matrix& m, const std::vector<int>& widths);

// y = shortcut(x) + relu(x W1 + b1) W2 + b2. The shortcut is the identity
// when in == out and a learned projection otherwise.
class ResidualBlock {
 public:
  struct Cache {
    Dense::Cache first, second, projection;
    Relu::Cache relu;
  };

  ResidualBlock() = default;
  ResidualBlock(int in, int out, const std::string& name, std::mt19937_64& rng);

  Matrix Forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix Backward(const Cache& cache, const Matrix& dy);

  // Zeroes the second layer so the block is its shortcut.
  void ZeroResidual();
  bool has_projection() const { return has_projection_; }
  int out() const { return second_.out(); }
  ParameterList Parameters();

 private:
  Dense first_, second_, projection_;
  bool has_projection_ = false;
};

// Stack of residual blocks.
class ResidualStack {
 public:
  struct Cache {
    std::vector<ResidualBlock::Cache> blocks;
  };

  ResidualStack() = default;
  ResidualStack(int in, const std::vector<int>& widths, const std::string& name,
                std::mt19937_64& rng);

  Matrix Forward(const Matrix& x, Cache* cache = nullptr) const;
  Matrix Backward(const Cache& cache, const Matrix& dy);
  int out() const;
  ParameterList Parameters();

 private:
  int in_ = 0;
  std::vector<ResidualBlock> blocks_;
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(ParameterList params, AdamConfig config = {});
  // Applies the accumulated gradients; does not clear them.
  void Step();
  std::int64_t steps() const { return t_; }

 private:
  ParameterList params_;
  AdamConfig config_;
  std::vector<Matrix> m_, v_;
  std::int64_t t_ = 0;
};

// Versioned binary parameter files: magic "DDZP", format version, tensor
// count, then per tensor its name, rows, cols and little-endian doubles.
inline constexpr std::uint32_t kParamFormatVersion = 1;
void SaveParameters(const ParameterList& params, const std::string& path);
// Throws std::runtime_error when the file is unreadable, has another
// version, or its names or shapes differ from `params`.
void LoadParameters(const ParameterList& params, const std::string& path);

}  // namespace ddz::nn

#endif  // DDZ_NEURAL_H_
