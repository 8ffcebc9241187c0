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

#ifndef UNICAP_NN_KERNELS_H_
#define UNICAP_NN_KERNELS_H_

#include <cstddef>

namespace unicap::nn::kernels {

// Dot product with eight independent partial sums; the summation order is
// fixed, so results do not depend on how the compiler vectorizes.
template <typename T>
inline T Dot(const T* a, const T* b, int n) {
  T s[8] = {};
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 8; ++l) s[l] += a[i + l] * b[i + l];
  }
  T tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((s[0] + s[1]) + (s[2] + s[3])) + ((s[4] + s[5]) + (s[6] + s[7])) + tail;
}

// y[j] += alpha * x[j]
template <typename T>
inline void Axpy(int n, T alpha, const T* x, T* y) {
  for (int j = 0; j < n; ++j) y[j] += alpha * x[j];
}

// C[m x n] += A[m x k] * B[k x n]
template <typename T>
void Gemm(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    T* ci = c + static_cast<size_t>(i) * ldc;
    const T* ai = a + static_cast<size_t>(i) * lda;
    for (int p = 0; p < k; ++p) {
      const T av = ai[p];
      if (av == T(0)) continue;
      Axpy(n, av, b + static_cast<size_t>(p) * ldb, ci);
    }
  }
}

// C[m x n] += A[m x k] * B^T, with B stored [n x k].
template <typename T>
void GemmBt(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    const T* ai = a + static_cast<size_t>(i) * lda;
    T* ci = c + static_cast<size_t>(i) * ldc;
    for (int p = 0; p < n; ++p) ci[p] += Dot(ai, b + static_cast<size_t>(p) * ldb, k);
  }
}

// C[m x n] += A^T * B, with A stored [k x m] and B stored [k x n].
template <typename T>
void GemmAt(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc) {
  for (int i = 0; i < k; ++i) {
    const T* ai = a + static_cast<size_t>(i) * lda;
    const T* bi = b + static_cast<size_t>(i) * ldb;
    for (int p = 0; p < m; ++p) {
      const T av = ai[p];
      if (av == T(0)) continue;
      Axpy(n, av, bi, c + static_cast<size_t>(p) * ldc);
    }
  }
}

}  // namespace unicap::nn::kernels

#endif  // UNICAP_NN_KERNELS_H_
