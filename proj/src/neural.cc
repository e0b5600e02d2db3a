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

#include "ddz/neural.h"

#include <cmath>
#include <cstring>
#include <fstream>

namespace ddz::nn {
namespace {

void UniformInit(Matrix& m, int fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

void CheckCols(const Matrix& x, Eigen::Index cols, const char* what) {
  if (x.cols() != cols) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(cols) +
                     " columns, got " + std::to_string(x.cols()));
  }
}

}  // namespace

void ZeroGrad(const ParameterList& params) {
  for (Parameter* p : params) p->grad.setZero();
}

void CopyValues(const ParameterList& from, const ParameterList& to) {
  if (from.size() != to.size()) throw ShapeError("parameter lists differ in length");
  for (size_t i = 0; i < from.size(); ++i) {
    if (from[i]->value.rows() != to[i]->value.rows() ||
        from[i]->value.cols() != to[i]->value.cols()) {
      throw ShapeError("parameter shapes differ: " + from[i]->name);
    }
    to[i]->value = from[i]->value;
  }
}

Dense::Dense(int in, int out, const std::string& name, std::mt19937_64& rng)
    : w_(name + ".w", in, out), b_(name + ".b", 1, out) {
  UniformInit(w_.value, in, rng);
}

Matrix Dense::Forward(const Matrix& x, Cache* cache) const {
  CheckCols(x, in(), w_.name.c_str());
  if (cache) cache->x = x;
  // Row by row, so each output row depends only on its input row.
  Matrix y(x.rows(), out());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    RowVector acc = b_.value.row(0);
    const double* xr = x.row(r).data();
    for (int k = 0; k < in(); ++k) {
      if (xr[k] != 0.0) acc.noalias() += xr[k] * w_.value.row(k);
    }
    y.row(r) = acc;
  }
  return y;
}

Matrix Dense::Backward(const Cache& cache, const Matrix& dy) {
  w_.grad.noalias() += cache.x.transpose() * dy;
  b_.grad.row(0) += dy.colwise().sum();
  return dy * w_.value.transpose();
}

void Dense::SetIdentity() {
  if (in() != out()) throw ShapeError("identity needs a square layer");
  w_.value.setIdentity();
  b_.value.setZero();
}

Matrix Relu::Forward(const Matrix& x, Cache* cache) {
  Matrix y = x.cwiseMax(0.0);
  if (cache) cache->y = y;
  return y;
}

Matrix Relu::Backward(const Cache& cache, const Matrix& dy) {
  return (cache.y.array() > 0.0).select(dy, 0.0);
}

Conv1d::Conv1d(int in_channels, int length, int out_channels, int kernel, int stride,
               const std::string& name, std::mt19937_64& rng)
    : in_channels_(in_channels),
      length_(length),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      w_(name + ".w", out_channels, in_channels * kernel),
      b_(name + ".b", 1, out_channels) {
  if (kernel < 1 || stride < 1 || kernel > length) throw ShapeError("bad conv geometry");
  UniformInit(w_.value, in_channels * kernel, rng);
}

Matrix Conv1d::Forward(const Matrix& x, Cache* cache) const {
  CheckCols(x, in_channels_ * length_, w_.name.c_str());
  if (cache) cache->x = x;
  const int n = static_cast<int>(x.rows());
  const int out_len = out_length();
  Matrix y(n, out_size());
  for (int row = 0; row < n; ++row) {
    for (int o = 0; o < out_channels_; ++o) {
      for (int t = 0; t < out_len; ++t) {
        double acc = b_.value(0, o);
        for (int c = 0; c < in_channels_; ++c) {
          const double* in = x.data() + row * x.cols() + c * length_ + t * stride_;
          const double* w = w_.value.data() + o * w_.value.cols() + c * kernel_;
          for (int k = 0; k < kernel_; ++k) acc += w[k] * in[k];
        }
        y(row, o * out_len + t) = acc;
      }
    }
  }
  return y;
}

Matrix Conv1d::Backward(const Cache& cache, const Matrix& dy) {
  const Matrix& x = cache.x;
  const int n = static_cast<int>(x.rows());
  const int out_len = out_length();
  Matrix dx = Matrix::Zero(n, x.cols());
  for (int row = 0; row < n; ++row) {
    for (int o = 0; o < out_channels_; ++o) {
      for (int t = 0; t < out_len; ++t) {
        const double g = dy(row, o * out_len + t);
        if (g == 0.0) continue;
        b_.grad(0, o) += g;
        for (int c = 0; c < in_channels_; ++c) {
          const int base = c * length_ + t * stride_;
          for (int k = 0; k < kernel_; ++k) {
            w_.grad(o, c * kernel_ + k) += g * x(row, base + k);
            dx(row, base + k) += g * w_.value(o, c * kernel_ + k);
          }
        }
      }
    }
  }
  return dx;
}

AvgPool1d::AvgPool1d(int channels, int length, int window, int stride, int pad_end)
    : channels_(channels), length_(length), window_(window), stride_(stride), pad_end_(pad_end) {
  if (window < 1 || stride < 1 || pad_end < 0 || window > length + pad_end) {
    throw ShapeError("bad pooling geometry");
  }
}

Matrix AvgPool1d::Forward(const Matrix& x, Cache*) const {
  CheckCols(x, channels_ * length_, "avgpool");
  const int out_len = out_length();
  Matrix y = Matrix::Zero(x.rows(), out_size());
  const double scale = 1.0 / window_;
  for (Eigen::Index row = 0; row < x.rows(); ++row) {
    for (int c = 0; c < channels_; ++c) {
      for (int t = 0; t < out_len; ++t) {
        double acc = 0;
        for (int k = 0; k < window_; ++k) {
          const int pos = t * stride_ + k;
          if (pos < length_) acc += x(row, c * length_ + pos);
        }
        y(row, c * out_len + t) = acc * scale;
      }
    }
  }
  return y;
}

Matrix AvgPool1d::Backward(const Cache&, const Matrix& dy) const {
  const int out_len = out_length();
  Matrix dx = Matrix::Zero(dy.rows(), channels_ * length_);
  const double scale = 1.0 / window_;
  for (Eigen::Index row = 0; row < dy.rows(); ++row) {
    for (int c = 0; c < channels_; ++c) {
      for (int t = 0; t < out_len; ++t) {
        const double g = dy(row, c * out_len + t) * scale;
        for (int k = 0; k < window_; ++k) {
          const int pos = t * stride_ + k;
          if (pos < length_) dx(row, c * length_ + pos) += g;
        }
      }
    }
  }
  return dx;
}

RowVector SetMaxPool::Forward(const Matrix& x, Cache* cache) {
  if (x.rows() == 0) throw ShapeError("max pool over an empty set");
  RowVector y = x.row(0);
  std::vector<int> argmax(x.cols(), 0);
  for (Eigen::Index r = 1; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (x(r, c) > y(c)) {
        y(c) = x(r, c);
        argmax[c] = static_cast<int>(r);
      }
    }
  }
  if (cache) {
    cache->rows = static_cast<int>(x.rows());
    cache->argmax = std::move(argmax);
  }
  return y;
}

Matrix SetMaxPool::Backward(const Cache& cache, const RowVector& dy) {
  Matrix dx = Matrix::Zero(cache.rows, dy.cols());
  for (Eigen::Index c = 0; c < dy.cols(); ++c) dx(cache.argmax[c], c) = dy(c);
  return dx;
}

Matrix ConcatColumns(const std::vector<const Matrix*>& parts) {
  if (parts.empty()) return Matrix();
  Eigen::Index cols = 0;
  for (const Matrix* p : parts) {
    if (p->rows() != parts[0]->rows()) throw ShapeError("concat: row counts differ");
    cols += p->cols();
  }
  Matrix out(parts[0]->rows(), cols);
  Eigen::Index at = 0;
  for (const Matrix* p : parts) {
    out.middleCols(at, p->cols()) = *p;
    at += p->cols();
  }
  return out;
}

std::vector<Matrix> SplitColumns(const Matrix& m, const std::vector<int>& widths) {
  std::vector<Matrix> out;
  Eigen::Index at = 0;
  for (int w : widths) {
    if (at + w > m.cols()) throw ShapeError("split: widths exceed columns");
    out.emplace_back(m.middleCols(at, w));
    at += w;
  }
  if (at != m.cols()) throw ShapeError("split: widths do not cover columns");
  return out;
}

ResidualBlock::ResidualBlock(int in, int out, const std::string& name,
                             std::mt19937_64& rng)
    : first_(in, out, name + ".fc1", rng),
      second_(out, out, name + ".fc2", rng),
      has_projection_(in != out) {
  if (has_projection_) projection_ = Dense(in, out, name + ".proj", rng);
}

Matrix ResidualBlock::Forward(const Matrix& x, Cache* cache) const {
  Matrix h = Relu::Forward(first_.Forward(x, cache ? &cache->first : nullptr),
                           cache ? &cache->relu : nullptr);
  Matrix y = second_.Forward(h, cache ? &cache->second : nullptr);
  if (has_projection_) {
    y += projection_.Forward(x, cache ? &cache->projection : nullptr);
  } else {
    y += x;
  }
  return y;
}

Matrix ResidualBlock::Backward(const Cache& cache, const Matrix& dy) {
  Matrix dh = Relu::Backward(cache.relu, second_.Backward(cache.second, dy));
  Matrix dx = first_.Backward(cache.first, dh);
  if (has_projection_) {
    dx += projection_.Backward(cache.projection, dy);
  } else {
    dx += dy;
  }
  return dx;
}

void ResidualBlock::ZeroResidual() {
  second_.weight().value.setZero();
  second_.bias().value.setZero();
}

ParameterList ResidualBlock::Parameters() {
  ParameterList out = first_.Parameters();
  for (Parameter* p : second_.Parameters()) out.push_back(p);
  if (has_projection_) {
    for (Parameter* p : projection_.Parameters()) out.push_back(p);
  }
  return out;
}

ResidualStack::ResidualStack(int in, const std::vector<int>& widths,
                             const std::string& name, std::mt19937_64& rng)
    : in_(in) {
  int prev = in;
  for (size_t i = 0; i < widths.size(); ++i) {
    blocks_.emplace_back(prev, widths[i], name + ".block" + std::to_string(i), rng);
    prev = widths[i];
  }
}

Matrix ResidualStack::Forward(const Matrix& x, Cache* cache) const {
  if (cache) cache->blocks.resize(blocks_.size());
  Matrix h = x;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    h = blocks_[i].Forward(h, cache ? &cache->blocks[i] : nullptr);
  }
  return h;
}

Matrix ResidualStack::Backward(const Cache& cache, const Matrix& dy) {
  Matrix g = dy;
  for (size_t i = blocks_.size(); i-- > 0;) g = blocks_[i].Backward(cache.blocks[i], g);
  return g;
}

int ResidualStack::out() const { return blocks_.empty() ? in_ : blocks_.back().out(); }

ParameterList ResidualStack::Parameters() {
  ParameterList out;
  for (ResidualBlock& b : blocks_) {
    for (Parameter* p : b.Parameters()) out.push_back(p);
  }
  return out;
}

Adam::Adam(ParameterList params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  for (Parameter* p : params_) {
    m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::Step() {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * p.grad.cwiseAbs2();
    p.value.array() -= config_.learning_rate * (m_[i].array() / c1) /
                       ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

namespace {

constexpr char kMagic[4] = {'D', 'D', 'Z', 'P'};

template <typename T>
void WritePod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("parameter file truncated");
  return v;
}

}  // namespace

void SaveParameters(const ParameterList& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, 4);
  WritePod(out, kParamFormatVersion);
  WritePod(out, static_cast<std::uint32_t>(params.size()));
  for (const Parameter* p : params) {
    WritePod(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    WritePod(out, static_cast<std::uint32_t>(p->value.rows()));
    WritePod(out, static_cast<std::uint32_t>(p->value.cols()));
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

void LoadParameters(const ParameterList& params, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error(path + " is not a parameter file");
  }
  const auto version = ReadPod<std::uint32_t>(in);
  if (version != kParamFormatVersion) {
    throw std::runtime_error("unsupported parameter file version " + std::to_string(version));
  }
  const auto count = ReadPod<std::uint32_t>(in);
  if (count != params.size()) {
    throw std::runtime_error("parameter count mismatch: file has " + std::to_string(count) +
                             ", model has " + std::to_string(params.size()));
  }
  std::vector<Matrix> values;
  for (const Parameter* p : params) {
    const auto name_size = ReadPod<std::uint32_t>(in);
    std::string name(name_size, '\0');
    in.read(name.data(), name_size);
    const auto rows = ReadPod<std::uint32_t>(in);
    const auto cols = ReadPod<std::uint32_t>(in);
    if (name != p->name || rows != p->value.rows() || cols != p->value.cols()) {
      throw std::runtime_error("parameter mismatch at " + p->name + ": file has " + name +
                               " " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw std::runtime_error("parameter file truncated");
    if (!m.allFinite()) throw std::runtime_error("non-finite values in " + name);
    values.push_back(std::move(m));
  }
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = std::move(values[i]);
}

}  // namespace ddz::nn
