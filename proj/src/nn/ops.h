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

#ifndef UNICAP_NN_OPS_H_
#define UNICAP_NN_OPS_H_

// Element-wise activations and the loss primitives of the closed op set.
// Backward functions take the forward output where that is sufficient.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "nn/matrix.h"

namespace unicap::nn {

template <typename T>
inline T SigmoidScalar(T x) {
  if (x >= 0) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
void Sigmoid(std::span<const T> x, std::span<T> y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] = SigmoidScalar(x[i]);
}
// dx += dy * y * (1 - y)
template <typename T>
void SigmoidBackward(std::span<const T> y, std::span<const T> dy, std::span<T> dx) {
  for (size_t i = 0; i < y.size(); ++i) dx[i] += dy[i] * y[i] * (T(1) - y[i]);
}

template <typename T>
void Tanh(std::span<const T> x, std::span<T> y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
}
template <typename T>
void TanhBackward(std::span<const T> y, std::span<const T> dy, std::span<T> dx) {
  for (size_t i = 0; i < y.size(); ++i) dx[i] += dy[i] * (T(1) - y[i] * y[i]);
}

template <typename T>
void Relu(std::span<const T> x, std::span<T> y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}
template <typename T>
void ReluBackward(std::span<const T> y, std::span<const T> dy, std::span<T> dx) {
  for (size_t i = 0; i < y.size(); ++i)
    if (y[i] > T(0)) dx[i] += dy[i];
}

// Concatenates along columns: [a | b].
template <typename T>
Matrix<T> Concat(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("Concat: row mismatch " + a.ShapeString() + " vs " + b.ShapeString());
  }
  Matrix<T> out(a.rows(), a.cols() + b.cols());
  for (int r = 0; r < a.rows(); ++r) {
    std::copy(a.row(r).begin(), a.row(r).end(), out.row(r).begin());
    std::copy(b.row(r).begin(), b.row(r).end(), out.row(r).begin() + a.cols());
  }
  return out;
}

// Splits a concatenated gradient back into its parts.
template <typename T>
void ConcatBackward(const Matrix<T>& d_out, int a_cols, Matrix<T>* da, Matrix<T>* db) {
  const int b_cols = d_out.cols() - a_cols;
  if (da) da->Reset(d_out.rows(), a_cols);
  if (db) db->Reset(d_out.rows(), b_cols);
  for (int r = 0; r < d_out.rows(); ++r) {
    auto src = d_out.row(r);
    if (da) std::copy(src.begin(), src.begin() + a_cols, da->row(r).begin());
    if (db) std::copy(src.begin() + a_cols, src.end(), db->row(r).begin());
  }
}

// ||a - b||^2
template <typename T>
T SquaredL2(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw ShapeError("SquaredL2: size mismatch " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  T s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const T d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// da += scale * 2 (a - b); db -= scale * 2 (a - b). Either may be empty.
template <typename T>
void SquaredL2Backward(std::span<const T> a, std::span<const T> b, T scale, std::span<T> da,
                       std::span<T> db) {
  for (size_t i = 0; i < a.size(); ++i) {
    const T g = T(2) * scale * (a[i] - b[i]);
    if (!da.empty()) da[i] += g;
    if (!db.empty()) db[i] -= g;
  }
}

// Log-softmax of one row; entries equal to -inf stay masked.
template <typename T>
void LogSoftmax(std::span<const T> logits, std::span<T> out) {
  T mx = -std::numeric_limits<T>::infinity();
  for (T v : logits) mx = std::max(mx, v);
  T sum = 0;
  for (T v : logits) sum += std::exp(v - mx);
  const T lse = mx + std::log(sum);
  for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
}

struct CrossEntropyResult {
  double loss_sum = 0;  // summed negative log-likelihood over counted rows
  int count = 0;        // rows with weight > 0
};

// Softmax cross-entropy of each row against targets[r]. Rows with
// weight[r] == 0 are ignored. When dlogits is non-null it receives
// scale * weight[r] * (softmax - onehot).
template <typename T>
CrossEntropyResult SoftmaxCrossEntropy(const Matrix<T>& logits, std::span<const int> targets,
                                       std::span<const T> weights, T scale, Matrix<T>* dlogits) {
  if (static_cast<int>(targets.size()) != logits.rows() ||
      static_cast<int>(weights.size()) != logits.rows()) {
    throw ShapeError("SoftmaxCrossEntropy: " + std::to_string(targets.size()) + " targets for logits " +
                     logits.ShapeString());
  }
  CrossEntropyResult res;
  if (dlogits) dlogits->Reset(logits.rows(), logits.cols());
  std::vector<T> logp(logits.cols());
  for (int r = 0; r < logits.rows(); ++r) {
    if (weights[r] == T(0)) continue;
    LogSoftmax<T>(logits.row(r), logp);
    res.loss_sum -= static_cast<double>(weights[r] * logp[targets[r]]);
    ++res.count;
    if (dlogits) {
      auto d = dlogits->row(r);
      const T w = scale * weights[r];
      for (int c = 0; c < logits.cols(); ++c) d[c] = w * std::exp(logp[c]);
      d[targets[r]] -= w;
    }
  }
  return res;
}

}  // namespace unicap::nn

#endif  // UNICAP_NN_OPS_H_
