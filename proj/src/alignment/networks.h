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

#ifndef UNICAP_ALIGNMENT_NETWORKS_H_
#define UNICAP_ALIGNMENT_NETWORKS_H_

#include <cmath>
#include <span>
#include <vector>

#include "common/error.h"
#include "nn/layers.h"
#include "nn/matrix.h"
#include "nn/ops.h"
#include "nn/parameter_store.h"

namespace unicap {

// Image feature -> sentence embedding: linear, relu, linear.
// Blocks "tr.l1.*" and "tr.l2.*".
template <typename T>
class Translator {
 public:
  struct Cache {
    nn::Matrix<T> x, hidden;
  };

  Translator() = default;

  static Translator Create(nn::ParameterStore<T>& store, int in, int hidden, int out, Rng& rng) {
    Translator t;
    t.l1_ = nn::Linear<T>::Create(store, "tr.l1", in, hidden, rng);
    t.l2_ = nn::Linear<T>::Create(store, "tr.l2", hidden, out, rng);
    return t;
  }
  static Translator Bind(nn::ParameterStore<T>& store) {
    Translator t;
    t.l1_ = nn::Linear<T>::Bind(store, "tr.l1");
    t.l2_ = nn::Linear<T>::Bind(store, "tr.l2");
    if (t.l1_.out() != t.l2_.in()) throw ShapeError("translator layer sizes do not chain");
    return t;
  }

  int in() const { return l1_.in(); }
  int out() const { return l2_.out(); }

  nn::Matrix<T> Forward(const nn::Matrix<T>& x, Cache* cache) const {
    nn::Matrix<T> pre, hidden, y;
    l1_.Forward(x, &pre);
    hidden.Reset(pre.rows(), pre.cols());
    nn::Relu<T>(pre.values(), hidden.values());
    l2_.Forward(hidden, &y);
    if (cache) {
      cache->x = x;
      cache->hidden = std::move(hidden);
    }
    return y;
  }

  // Accumulates parameter gradients; features receive none.
  void Backward(const Cache& cache, const nn::Matrix<T>& d_out) const {
    nn::Matrix<T> d_hidden;
    l2_.Backward(cache.hidden, d_out, &d_hidden);
    nn::Matrix<T> d_pre(d_hidden.rows(), d_hidden.cols());
    nn::ReluBackward<T>(cache.hidden.values(), d_hidden.values(), d_pre.values());
    l1_.Backward(cache.x, d_pre, nullptr);
  }

 private:
  nn::Linear<T> l1_, l2_;
};

// Concept-conditioned critic D(e, c): concat, linear, relu, linear to a
// scalar. Blocks "critic.l1.*" and "critic.l2.*".
template <typename T>
class Critic {
 public:
  struct Cache {
    nn::Matrix<T> x, hidden;
  };

  Critic() = default;

  static Critic Create(nn::ParameterStore<T>& store, int embed_dim, int concept_dim, int hidden, Rng& rng) {
    Critic c;
    c.embed_dim_ = embed_dim;
    c.l1_ = nn::Linear<T>::Create(store, "critic.l1", embed_dim + concept_dim, hidden, rng);
    c.l2_ = nn::Linear<T>::Create(store, "critic.l2", hidden, 1, rng);
    return c;
  }
  static Critic Bind(nn::ParameterStore<T>& store, int embed_dim) {
    Critic c;
    c.embed_dim_ = embed_dim;
    c.l1_ = nn::Linear<T>::Bind(store, "critic.l1");
    c.l2_ = nn::Linear<T>::Bind(store, "critic.l2");
    if (c.l1_.out() != c.l2_.in() || c.l2_.out() != 1 || c.l1_.in() <= embed_dim) {
      throw ShapeError("critic layer sizes are inconsistent");
    }
    return c;
  }

  int embed_dim() const { return embed_dim_; }
  int concept_dim() const { return l1_.in() - embed_dim_; }
  int hidden() const { return l1_.out(); }
  nn::Linear<T>& l1() { return l1_; }
  nn::Linear<T>& l2() { return l2_; }

  std::vector<T> Forward(const nn::Matrix<T>& embed, const nn::Matrix<T>& concepts, Cache* cache) const {
    if (embed.cols() != embed_dim_ || concepts.cols() != concept_dim()) {
      throw ShapeError("critic input " + embed.ShapeString() + " + " + concepts.ShapeString() +
                       " vs expected width " + std::to_string(embed_dim_) + " + " +
                       std::to_string(concept_dim()));
    }
    nn::Matrix<T> x = nn::Concat(embed, concepts);
    nn::Matrix<T> pre, hidden, score;
    l1_.Forward(x, &pre);
    hidden.Reset(pre.rows(), pre.cols());
    nn::Relu<T>(pre.values(), hidden.values());
    l2_.Forward(hidden, &score);
    if (cache) {
      cache->x = std::move(x);
      cache->hidden = std::move(hidden);
    }
    return score.values();
  }

  // Accumulates parameter gradients for dL/dscore; writes dL/d(embedding)
  // when d_embed is non-null.
  void Backward(const Cache& cache, std::span<const T> d_score, nn::Matrix<T>* d_embed) const {
    nn::Matrix<T> ds(static_cast<int>(d_score.size()), 1);
    std::copy(d_score.begin(), d_score.end(), ds.values().begin());
    nn::Matrix<T> d_hidden;
    l2_.Backward(cache.hidden, ds, &d_hidden);
    nn::Matrix<T> d_pre(d_hidden.rows(), d_hidden.cols());
    nn::ReluBackward<T>(cache.hidden.values(), d_hidden.values(), d_pre.values());
    nn::Matrix<T> dx;
    l1_.Backward(cache.x, d_pre, d_embed ? &dx : nullptr);
    if (d_embed) nn::ConcatBackward<T>(dx, embed_dim_, d_embed, nullptr);
  }

  // Gradient of the score w.r.t. the embedding part of the input, per row.
  nn::Matrix<T> InputGradient(const nn::Matrix<T>& embed, const nn::Matrix<T>& concepts) const {
    Cache cache;
    Forward(embed, concepts, &cache);
    return InputGradientFromCache(cache);
  }

  struct PenaltyResult {
    double penalty = 0;       // mean over rows of coeff * (|g| - 1)^2
    double mean_grad_norm = 0;
  };

  // Gradient penalty at the given points. With backward set, adds
  // scale * dPenalty/dtheta to the parameter gradients. The critic is
  // piecewise linear, so the second-order terms reduce to products of the
  // active-unit mask with the weights.
  PenaltyResult GradientPenalty(const nn::Matrix<T>& embed, const nn::Matrix<T>& concepts, double coeff,
                                T scale, bool backward) const {
    Cache cache;
    Forward(embed, concepts, &cache);
    const int B = embed.rows(), H = hidden(), E = embed_dim_;
    auto& w1 = l1_.weight();
    auto& w2 = l2_.weight();
    PenaltyResult res;
    std::vector<T> u(H), g(E), q(E);
    for (int b = 0; b < B; ++b) {
      for (int h = 0; h < H; ++h) u[h] = cache.hidden(b, h) > T(0) ? w2.value[h] : T(0);
      double norm2 = 0;
      for (int k = 0; k < E; ++k) {
        g[k] = nn::kernels::Dot(w1.value.data() + static_cast<size_t>(k) * H, u.data(), H);
        norm2 += static_cast<double>(g[k]) * g[k];
      }
      const double norm = std::sqrt(norm2);
      res.penalty += coeff * (norm - 1) * (norm - 1);
      res.mean_grad_norm += norm;
      if (!backward || norm == 0) continue;
      const double c = scale * 2 * coeff * (norm - 1) / norm / B;
      for (int k = 0; k < E; ++k) q[k] = static_cast<T>(c * g[k]);
      for (int k = 0; k < E; ++k) {
        nn::kernels::Axpy(H, q[k], u.data(), w1.grad.data() + static_cast<size_t>(k) * H);
      }
      for (int h = 0; h < H; ++h) {
        if (cache.hidden(b, h) <= T(0)) continue;
        T s = 0;
        for (int k = 0; k < E; ++k) s += w1.value[static_cast<size_t>(k) * H + h] * q[k];
        w2.grad[h] += s;
      }
    }
    res.penalty /= B;
    res.mean_grad_norm /= B;
    return res;
  }

 private:
  nn::Matrix<T> InputGradientFromCache(const Cache& cache) const {
    const int B = cache.x.rows(), H = hidden(), E = embed_dim_;
    nn::Matrix<T> out(B, E);
    std::vector<T> u(H);
    for (int b = 0; b < B; ++b) {
      for (int h = 0; h < H; ++h) u[h] = cache.hidden(b, h) > T(0) ? l2_.weight().value[h] : T(0);
      for (int k = 0; k < E; ++k) {
        out(b, k) = nn::kernels::Dot(l1_.weight().value.data() + static_cast<size_t>(k) * H, u.data(), H);
      }
    }
    return out;
  }

  int embed_dim_ = 0;
  nn::Linear<T> l1_, l2_;
};

struct RobustResult {
  double loss = 0;
  int index = 0;
};

// min_k |t - c_k|^2 and its argmin (lowest index on ties). With d_t
// non-empty, adds scale * d/dt of the selected term.
template <typename T>
RobustResult RobustLoss(std::span<const T> t, const std::vector<std::span<const T>>& candidates, T scale = T(0),
                        std::span<T> d_t = {}) {
  if (candidates.empty()) throw ValidationError("robust loss needs at least one candidate");
  RobustResult r;
  r.loss = static_cast<double>(nn::SquaredL2<T>(t, candidates[0]));
  for (size_t k = 1; k < candidates.size(); ++k) {
    const double d = static_cast<double>(nn::SquaredL2<T>(t, candidates[k]));
    if (d < r.loss) {
      r.loss = d;
      r.index = static_cast<int>(k);
    }
  }
  if (!d_t.empty()) nn::SquaredL2Backward<T>(t, candidates[r.index], scale, d_t, {});
  return r;
}

// mean_k |t - c_k|^2, the non-robust alignment baseline.
template <typename T>
double MeanL2Loss(std::span<const T> t, const std::vector<std::span<const T>>& candidates, T scale = T(0),
                  std::span<T> d_t = {}) {
  if (candidates.empty()) throw ValidationError("alignment loss needs at least one candidate");
  double sum = 0;
  const T each = scale / static_cast<T>(candidates.size());
  for (const auto& c : candidates) {
    sum += static_cast<double>(nn::SquaredL2<T>(t, c));
    if (!d_t.empty()) nn::SquaredL2Backward<T>(t, c, each, d_t, {});
  }
  return sum / candidates.size();
}

}  // namespace unicap

#endif  // UNICAP_ALIGNMENT_NETWORKS_H_
