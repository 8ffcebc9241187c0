// Copyright 2026 The Unicap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNICAP_NN_MATRIX_H_
#define UNICAP_NN_MATRIX_H_

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "common/error.h"

namespace unicap::nn {

// Dense row-major matrix. Rows are batch items throughout the library.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  T operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  std::span<T> row(int r) { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
  std::span<const T> row(int r) const {
    return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }

  // Resizes and zero-fills.
  void Reset(int rows, int cols) {
    rows_ = rows;
    cols_ = cols;
    data_.assign(static_cast<size_t>(rows) * cols, T(0));
  }
  void SetZero() { std::fill(data_.begin(), data_.end(), T(0)); }

  std::string ShapeString() const {
    return "[" + std::to_string(rows_) + " x " + std::to_string(cols_) + "]";
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

template <typename T, typename U>
void CheckSameShape(const Matrix<T>& a, const Matrix<U>& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.ShapeString() + " vs " +
                     b.ShapeString());
  }
}

}  // namespace unicap::nn

#endif  // UNICAP_NN_MATRIX_H_
