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

#ifndef DDZ_DLX_H_
#define DDZ_DLX_H_

#include <functional>
#include <span>
#include <vector>

namespace ddz {

// Algorithm X over a toroidal doubly-linked sparse matrix (dancing links).
// Nodes live in flat arrays and are addressed by index; node 0 is the root
// header, nodes 1..num_columns are column headers.
class ExactCover {
 public:
  explicit ExactCover(int num_columns);

  // Adds a row covering `columns` (distinct, each in [0, num_columns)).
  // Returns the row id.
  int AddRow(std::span<const int> columns);

  int num_rows() const { return num_rows_; }

  // Calls `visit` with the row ids of every exact cover, in search order.
  // Returning false from `visit` stops the search.
  void Solve(const std::function<bool(std::span<const int>)>& visit);

 private:
  void Cover(int column);
  void Uncover(int column);
  bool Search(const std::function<bool(std::span<const int>)>& visit);

  std::vector<int> left_, right_, up_, down_, column_, row_;
  std::vector<int> size_;
  std::vector<int> solution_;
  int num_columns_;
  int num_rows_ = 0;
};

}  // namespace ddz

#endif  // DDZ_DLX_H_
