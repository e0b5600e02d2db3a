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

#include "ddz/dlx.h"

#include <stdexcept>

namespace ddz {

ExactCover::ExactCover(int num_columns) : num_columns_(num_columns) {
  const int headers = num_columns + 1;
  left_.resize(headers);
  right_.resize(headers);
  up_.resize(headers);
  down_.resize(headers);
  column_.resize(headers);
  row_.assign(headers, -1);
  size_.assign(headers, 0);
  for (int i = 0; i < headers; ++i) {
    left_[i] = (i + headers - 1) % headers;
    right_[i] = (i + 1) % headers;
    up_[i] = down_[i] = column_[i] = i;
  }
}

int ExactCover::AddRow(std::span<const int> columns) {
  const int row = num_rows_++;
  int first = -1;
  for (int c : columns) {
    if (c < 0 || c >= num_columns_) throw std::out_of_range("column out of range");
    const int header = c + 1;
    const int node = static_cast<int>(left_.size());
    column_.push_back(header);
    row_.push_back(row);
    // Append at the bottom of the column.
    up_.push_back(up_[header]);
    down_.push_back(header);
    down_[up_[header]] = node;
    up_[header] = node;
    ++size_[header];
    if (first < 0) {
      first = node;
      left_.push_back(node);
      right_.push_back(node);
    } else {
      left_.push_back(left_[first]);
      right_.push_back(first);
      right_[left_[first]] = node;
      left_[first] = node;
    }
  }
  return row;
}

void ExactCover::Cover(int column) {
  right_[left_[column]] = right_[column];
  left_[right_[column]] = left_[column];
  for (int i = down_[column]; i != column; i = down_[i]) {
    for (int j = right_[i]; j != i; j = right_[j]) {
      up_[down_[j]] = up_[j];
      down_[up_[j]] = down_[j];
      --size_[column_[j]];
    }
  }
}

void ExactCover::Uncover(int column) {
  for (int i = up_[column]; i != column; i = up_[i]) {
    for (int j = left_[i]; j != i; j = left_[j]) {
      ++size_[column_[j]];
      up_[down_[j]] = j;
      down_[up_[j]] = j;
    }
  }
  right_[left_[column]] = column;
  left_[right_[column]] = column;
}

bool ExactCover::Search(const std::function<bool(std::span<const int>)>& visit) {
  if (right_[0] == 0) return visit(solution_);
  // Smallest column first; ties go to the leftmost.
  int best = right_[0];
  for (int c = right_[best]; c != 0; c = right_[c]) {
    if (size_[c] < size_[best]) best = c;
  }
  if (size_[best] == 0) return true;
  Cover(best);
  bool keep_going = true;
  for (int r = down_[best]; r != best && keep_going; r = down_[r]) {
    solution_.push_back(row_[r]);
    for (int j = right_[r]; j != r; j = right_[j]) Cover(column_[j]);
    keep_going = Search(visit);
    for (int j = left_[r]; j != r; j = left_[j]) Uncover(column_[j]);
    solution_.pop_back();
  }
  Uncover(best);
  return keep_going;
}

void ExactCover::Solve(const std::function<bool(std::span<const int>)>& visit) {
  solution_.clear();
  Search(visit);
}

}  // namespace ddz
