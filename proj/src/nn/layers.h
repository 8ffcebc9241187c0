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

#ifndef UNICAP_NN_LAYERS_H_
#define UNICAP_NN_LAYERS_H_

#include <span>
#include <string>
#include <vector>

#include "nn/kernels.h"
#include "nn/matrix.h"
#include "nn/ops.h"
#include "nn/parameter_store.h"

namespace unicap::nn {

namespace internal {

inline std::string ShapeOf(int a, int b) {
  return "[" + std::to_string(a) + " x " + std::to_string(b) + "]";
}

template <typename T>
ParamBlock<T>& GetShaped(ParameterStore<T>& store, const std::string& name, size_t rank) {
  auto& b = store.Get(name);
  if (b.shape.size() != rank) {
    throw ShapeError(name + ": expected rank " + std::to_string(rank) + ", got " + b.ShapeString());
  }
  return b;
}

}  // namespace internal

// y = x W + b with W stored [in x out].
template <typename T>
class Linear {
 public:
  Linear() = default;

  static Linear Create(ParameterStore<T>& store, const std::string& name, int in, int out, Rng& rng) {
    Linear l;
    l.weight_ = &store.Add(name + ".w", {static_cast<uint32_t>(in), static_cast<uint32_t>(out)});
    l.bias_ = &store.Add(name + ".b", {static_cast<uint32_t>(out)});
    GlorotUniform(*l.weight_, in, out, rng);
    return l;
  }

  static Linear Bind(ParameterStore<T>& store, const std::string& name) {
    Linear l;
    l.weight_ = &internal::GetShaped(store, name + ".w", 2);
    l.bias_ = &internal::GetShaped(store, name + ".b", 1);
    if (l.bias_->shape[0] != l.weight_->shape[1]) {
      throw ShapeError(name + ": bias " + l.bias_->ShapeString() + " does not match weight " +
                       l.weight_->ShapeString());
    }
    return l;
  }

  int in() const { return static_cast<int>(weight_->shape[0]); }
  int out() const { return static_cast<int>(weight_->shape[1]); }
  ParamBlock<T>& weight() const { return *weight_; }
  ParamBlock<T>& bias() const { return *bias_; }

  void Forward(const Matrix<T>& x, Matrix<T>* y) const {
    if (x.cols() != in()) {
      throw ShapeError(weight_->name + ": input " + x.ShapeString() + " vs weight " +
                       weight_->ShapeString());
    }
    y->Reset(x.rows(), out());
    for (int r = 0; r < x.rows(); ++r) std::copy(bias_->value.begin(), bias_->value.end(), y->row(r).begin());
    kernels::Gemm(x.rows(), out(), in(), x.data(), in(), weight_->value.data(), out(), y->data(), out());
  }

  // Accumulates dW and db. dx, when non-null, is overwritten with dL/dx.
  void Backward(const Matrix<T>& x, const Matrix<T>& dy, Matrix<T>* dx) const {
    if (dy.rows() != x.rows() || dy.cols() != out()) {
      throw ShapeError(weight_->name + ": output grad " + dy.ShapeString() + " vs expected " +
                       internal::ShapeOf(x.rows(), out()));
    }
    kernels::GemmAt(in(), out(), x.rows(), x.data(), in(), dy.data(), out(), weight_->grad.data(), out());
    for (int r = 0; r < dy.rows(); ++r) {
      auto d = dy.row(r);
      for (int c = 0; c < out(); ++c) bias_->grad[c] += d[c];
    }
    if (dx) {
      dx->Reset(x.rows(), in());
      kernels::GemmBt(x.rows(), in(), out(), dy.data(), out(), weight_->value.data(), out(), dx->data(), in());
    }
  }

 private:
  ParamBlock<T>* weight_ = nullptr;
  ParamBlock<T>* bias_ = nullptr;
};

// Token embedding table [vocab x dim].
template <typename T>
class Embedding {
 public:
  Embedding() = default;

  static Embedding Create(ParameterStore<T>& store, const std::string& name, int vocab, int dim,
                          Rng& rng) {
    Embedding e;
    e.table_ = &store.Add(name, {static_cast<uint32_t>(vocab), static_cast<uint32_t>(dim)});
    UniformInit(*e.table_, 0.1, rng);
    return e;
  }

  static Embedding Bind(ParameterStore<T>& store, const std::string& name) {
    Embedding e;
    e.table_ = &internal::GetShaped(store, name, 2);
    return e;
  }

  int vocab() const { return static_cast<int>(table_->shape[0]); }
  int dim() const { return static_cast<int>(table_->shape[1]); }
  ParamBlock<T>& table() const { return *table_; }

  void Lookup(std::span<const int> ids, Matrix<T>* out) const {
    out->Reset(static_cast<int>(ids.size()), dim());
    for (size_t r = 0; r < ids.size(); ++r) {
      if (ids[r] < 0 || ids[r] >= vocab()) {
        throw ShapeError(table_->name + ": token id " + std::to_string(ids[r]) + " outside " +
                         table_->ShapeString());
      }
      const T* src = table_->value.data() + static_cast<size_t>(ids[r]) * dim();
      std::copy(src, src + dim(), out->row(static_cast<int>(r)).begin());
    }
  }

  // Scatter-adds rows of d_out; rows whose mask entry is zero are skipped.
  void Backward(std::span<const int> ids, const Matrix<T>& d_out, std::span<const T> mask) const {
    for (size_t r = 0; r < ids.size(); ++r) {
      if (!mask.empty() && mask[r] == T(0)) continue;
      T* dst = table_->grad.data() + static_cast<size_t>(ids[r]) * dim();
      kernels::Axpy(dim(), T(1), d_out.row(static_cast<int>(r)).data(), dst);
    }
  }

 private:
  ParamBlock<T>* table_ = nullptr;
};

// Gated recurrent unit:
//   r  = sigmoid(W_r x + U_r h + b_r)
//   z  = sigmoid(W_z x + U_z h + b_z)
//   n  = tanh(W_h x + U_h (r * h) + b_h)
//   h' = (1 - z) * h + z * n
// Blocks: <name>.wx [in x 3H], <name>.wh [H x 3H], <name>.b [3H]; gate
// columns are ordered r, z, n.
template <typename T>
class GruCell {
 public:
  struct Cache {
    Matrix<T> x, h, r, z, n, rh;
  };

  GruCell() = default;

  static GruCell Create(ParameterStore<T>& store, const std::string& name, int in, int hidden, Rng& rng) {
    GruCell g;
    const auto h3 = static_cast<uint32_t>(3 * hidden);
    g.wx_ = &store.Add(name + ".wx", {static_cast<uint32_t>(in), h3});
    g.wh_ = &store.Add(name + ".wh", {static_cast<uint32_t>(hidden), h3});
    g.b_ = &store.Add(name + ".b", {h3});
    GlorotUniform(*g.wx_, in, hidden, rng);
    GlorotUniform(*g.wh_, hidden, hidden, rng);
    return g;
  }

  static GruCell Bind(ParameterStore<T>& store, const std::string& name) {
    GruCell g;
    g.wx_ = &internal::GetShaped(store, name + ".wx", 2);
    g.wh_ = &internal::GetShaped(store, name + ".wh", 2);
    g.b_ = &internal::GetShaped(store, name + ".b", 1);
    const uint32_t h3 = g.wh_->shape[1];
    if (h3 % 3 != 0 || g.wh_->shape[0] * 3 != h3 || g.wx_->shape[1] != h3 || g.b_->shape[0] != h3) {
      throw ShapeError(name + ": inconsistent GRU shapes " + g.wx_->ShapeString() + ", " +
                       g.wh_->ShapeString() + ", " + g.b_->ShapeString());
    }
    return g;
  }

  int in() const { return static_cast<int>(wx_->shape[0]); }
  int hidden() const { return static_cast<int>(wh_->shape[0]); }

  void Forward(const Matrix<T>& x, const Matrix<T>& h, Cache* cache, Matrix<T>* h_out) const {
    const int B = x.rows(), H = hidden(), I = in(), H3 = 3 * H;
    if (x.cols() != I || h.cols() != H || h.rows() != B) {
      throw ShapeError(wx_->name + ": inputs x " + x.ShapeString() + ", h " + h.ShapeString() +
                       " vs GRU in=" + std::to_string(I) + " hidden=" + std::to_string(H));
    }
    Matrix<T> gates(B, H3);
    for (int r = 0; r < B; ++r) std::copy(b_->value.begin(), b_->value.end(), gates.row(r).begin());
    kernels::Gemm(B, H3, I, x.data(), I, wx_->value.data(), H3, gates.data(), H3);
    // Recurrent contributions to r and z.
    kernels::Gemm(B, 2 * H, H, h.data(), H, wh_->value.data(), H3, gates.data(), H3);

    cache->x = x;
    cache->h = h;
    cache->r.Reset(B, H);
    cache->z.Reset(B, H);
    cache->n.Reset(B, H);
    cache->rh.Reset(B, H);
    for (int b = 0; b < B; ++b) {
      auto g = gates.row(b);
      for (int k = 0; k < H; ++k) {
        const T r = SigmoidScalar(g[k]);
        cache->r(b, k) = r;
        cache->z(b, k) = SigmoidScalar(g[H + k]);
        cache->rh(b, k) = r * h(b, k);
      }
    }
    kernels::Gemm(B, H, H, cache->rh.data(), H, wh_->value.data() + 2 * H, H3, gates.data() + 2 * H, H3);
    h_out->Reset(B, H);
    for (int b = 0; b < B; ++b) {
      for (int k = 0; k < H; ++k) {
        const T n = std::tanh(gates(b, 2 * H + k));
        const T z = cache->z(b, k);
        cache->n(b, k) = n;
        (*h_out)(b, k) = (T(1) - z) * h(b, k) + z * n;
      }
    }
  }

  // Accumulates parameter gradients. dx and dh, when non-null, are
  // overwritten with the gradients w.r.t. the step input and previous state.
  void Backward(const Cache& c, const Matrix<T>& dh_out, Matrix<T>* dx, Matrix<T>* dh) const {
    const int B = c.x.rows(), H = hidden(), I = in(), H3 = 3 * H;
    CheckSameShape(dh_out, c.h, "GruCell::Backward");
    Matrix<T> da(B, H3);  // pre-activation gradients, columns r | z | n
    for (int b = 0; b < B; ++b) {
      for (int k = 0; k < H; ++k) {
        const T g = dh_out(b, k);
        const T z = c.z(b, k), n = c.n(b, k);
        da(b, H + k) = g * (n - c.h(b, k)) * z * (T(1) - z);
        da(b, 2 * H + k) = g * z * (T(1) - n * n);
      }
    }
    // d(r*h) = da_n U_n^T
    Matrix<T> drh(B, H);
    kernels::GemmBt(B, H, H, da.data() + 2 * H, H3, wh_->value.data() + 2 * H, H3, drh.data(), H);
    for (int b = 0; b < B; ++b) {
      for (int k = 0; k < H; ++k) {
        const T r = c.r(b, k);
        da(b, k) = drh(b, k) * c.h(b, k) * r * (T(1) - r);
      }
    }
    kernels::GemmAt(I, H3, B, c.x.data(), I, da.data(), H3, wx_->grad.data(), H3);
    kernels::GemmAt(H, 2 * H, B, c.h.data(), H, da.data(), H3, wh_->grad.data(), H3);
    kernels::GemmAt(H, H, B, c.rh.data(), H, da.data() + 2 * H, H3, wh_->grad.data() + 2 * H, H3);
    for (int b = 0; b < B; ++b) {
      auto d = da.row(b);
      for (int k = 0; k < H3; ++k) b_->grad[k] += d[k];
    }
    if (dx) {
      dx->Reset(B, I);
      kernels::GemmBt(B, I, H3, da.data(), H3, wx_->value.data(), H3, dx->data(), I);
    }
    if (dh) {
      dh->Reset(B, H);
      for (int b = 0; b < B; ++b) {
        for (int k = 0; k < H; ++k) {
          (*dh)(b, k) = dh_out(b, k) * (T(1) - c.z(b, k)) + drh(b, k) * c.r(b, k);
        }
      }
      kernels::GemmBt(B, H, 2 * H, da.data(), H3, wh_->value.data(), H3, dh->data(), H);
    }
  }

 private:
  ParamBlock<T>* wx_ = nullptr;
  ParamBlock<T>* wh_ = nullptr;
  ParamBlock<T>* b_ = nullptr;
};

}  // namespace unicap::nn

#endif  // UNICAP_NN_LAYERS_H_
