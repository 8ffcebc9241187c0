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

#include "language_model/sequence_model.h"

#include <algorithm>

#include "common/error.h"
#include "text_corpus/vocabulary.h"

namespace unicap {

using nn::Matrix;

TokenBatch TokenBatch::FromSequences(const std::vector<std::span<const int>>& seqs) {
  TokenBatch b;
  b.batch = static_cast<int>(seqs.size());
  for (const auto& s : seqs) {
    if (s.empty()) throw ValidationError("empty token sequence in batch");
    b.steps = std::max(b.steps, static_cast<int>(s.size()));
    b.lengths.push_back(static_cast<int>(s.size()));
  }
  b.ids.assign(static_cast<size_t>(b.steps) * b.batch, Vocabulary::kPad);
  for (int i = 0; i < b.batch; ++i) {
    for (int t = 0; t < b.lengths[i]; ++t) b.ids[static_cast<size_t>(t) * b.batch + i] = seqs[i][t];
  }
  return b;
}

// Encoder ------------------------------------------------------------------

template <typename T>
Encoder<T> Encoder<T>::Create(nn::ParameterStore<T>& store, const LmDims& dims, Rng& rng) {
  Encoder e;
  e.embed_ = nn::Embedding<T>::Create(store, "enc.embed", dims.vocab, dims.word_dim, rng);
  e.gru_ = nn::GruCell<T>::Create(store, "enc.gru", dims.word_dim, dims.hidden, rng);
  e.proj_ = nn::Linear<T>::Create(store, "enc.proj", dims.hidden, dims.embed_dim, rng);
  return e;
}

template <typename T>
Encoder<T> Encoder<T>::Bind(nn::ParameterStore<T>& store) {
  Encoder e;
  e.embed_ = nn::Embedding<T>::Bind(store, "enc.embed");
  e.gru_ = nn::GruCell<T>::Bind(store, "enc.gru");
  e.proj_ = nn::Linear<T>::Bind(store, "enc.proj");
  if (e.gru_.in() != e.embed_.dim() || e.proj_.in() != e.gru_.hidden()) {
    throw ShapeError("encoder blocks have inconsistent dimensions");
  }
  return e;
}

template <typename T>
Matrix<T> Encoder<T>::Forward(const std::vector<std::span<const int>>& seqs, Cache* cache) const {
  Cache local;
  Cache& c = cache ? *cache : local;
  c.batch = TokenBatch::FromSequences(seqs);
  const int B = c.batch.batch, H = gru_.hidden();
  c.inputs.assign(c.batch.steps, {});
  c.steps.assign(c.batch.steps, {});
  Matrix<T> h(B, H), h_next;
  for (int t = 0; t < c.batch.steps; ++t) {
    embed_.Lookup(c.batch.Step(t), &c.inputs[t]);
    gru_.Forward(c.inputs[t], h, &c.steps[t], &h_next);
    // Finished rows keep their state.
    for (int b = 0; b < B; ++b) {
      if (t < c.batch.lengths[b]) std::copy(h_next.row(b).begin(), h_next.row(b).end(), h.row(b).begin());
    }
  }
  c.final_state = h;
  Matrix<T> out;
  proj_.Forward(h, &out);
  if (!cache) {
    c.inputs.clear();
    c.steps.clear();
  }
  return out;
}

template <typename T>
void Encoder<T>::Backward(const Cache& c, const Matrix<T>& d_embed) const {
  const int B = c.batch.batch, H = gru_.hidden();
  Matrix<T> dh;
  proj_.Backward(c.final_state, d_embed, &dh);
  Matrix<T> dh_active(B, H), dx, dh_prev;
  std::vector<T> mask(B);
  for (int t = c.batch.steps - 1; t >= 0; --t) {
    for (int b = 0; b < B; ++b) {
      const bool active = t < c.batch.lengths[b];
      mask[b] = active ? T(1) : T(0);
      for (int k = 0; k < H; ++k) dh_active(b, k) = active ? dh(b, k) : T(0);
    }
    gru_.Backward(c.steps[t], dh_active, &dx, &dh_prev);
    embed_.Backward(c.batch.Step(t), dx, mask);
    for (int b = 0; b < B; ++b) {
      if (mask[b] != T(0)) std::copy(dh_prev.row(b).begin(), dh_prev.row(b).end(), dh.row(b).begin());
    }
  }
}

// Decoder ------------------------------------------------------------------

template <typename T>
Decoder<T> Decoder<T>::Create(nn::ParameterStore<T>& store, const LmDims& dims, Rng& rng) {
  Decoder d;
  d.init_ = nn::Linear<T>::Create(store, "dec.init", dims.embed_dim, dims.hidden, rng);
  d.embed_ = nn::Embedding<T>::Create(store, "dec.embed", dims.vocab, dims.word_dim, rng);
  d.gru_ = nn::GruCell<T>::Create(store, "dec.gru", dims.word_dim, dims.hidden, rng);
  d.out_ = nn::Linear<T>::Create(store, "dec.out", dims.hidden, dims.vocab, rng);
  return d;
}

template <typename T>
Decoder<T> Decoder<T>::Bind(nn::ParameterStore<T>& store) {
  Decoder d;
  d.init_ = nn::Linear<T>::Bind(store, "dec.init");
  d.embed_ = nn::Embedding<T>::Bind(store, "dec.embed");
  d.gru_ = nn::GruCell<T>::Bind(store, "dec.gru");
  d.out_ = nn::Linear<T>::Bind(store, "dec.out");
  if (d.init_.out() != d.gru_.hidden() || d.gru_.in() != d.embed_.dim() ||
      d.out_.in() != d.gru_.hidden() || d.out_.out() != d.embed_.vocab()) {
    throw ShapeError("decoder blocks have inconsistent dimensions");
  }
  return d;
}

template <typename T>
nn::CrossEntropyResult Decoder<T>::ForwardTeacher(const Matrix<T>& embed,
                                                  const std::vector<std::span<const int>>& seqs,
                                                  T scale, Cache* cache) const {
  if (embed.rows() != static_cast<int>(seqs.size())) {
    throw ShapeError("decoder: " + std::to_string(seqs.size()) + " sequences for embeddings " +
                     embed.ShapeString());
  }
  Cache local;
  Cache& c = cache ? *cache : local;
  // Inputs are seq[0..n-2], targets seq[1..n-1].
  std::vector<std::span<const int>> inputs;
  for (const auto& s : seqs) {
    if (s.size() < 2) throw ValidationError("decoder target needs at least bos and eos");
    inputs.push_back(s.first(s.size() - 1));
  }
  c.batch = TokenBatch::FromSequences(inputs);
  const int B = c.batch.batch;
  c.embed_in = embed;
  init_.Forward(embed, &c.h0);
  c.inputs.assign(c.batch.steps, {});
  c.steps.assign(c.batch.steps, {});
  c.states.assign(c.batch.steps, {});
  c.d_logits.assign(c.batch.steps, {});

  nn::CrossEntropyResult total;
  Matrix<T> logits;
  std::vector<int> targets(B);
  std::vector<T> weights(B);
  const Matrix<T>* h = &c.h0;
  for (int t = 0; t < c.batch.steps; ++t) {
    embed_.Lookup(c.batch.Step(t), &c.inputs[t]);
    gru_.Forward(c.inputs[t], *h, &c.steps[t], &c.states[t]);
    h = &c.states[t];
    out_.Forward(*h, &logits);
    for (int b = 0; b < B; ++b) {
      const bool active = t < c.batch.lengths[b];
      targets[b] = active ? seqs[b][t + 1] : Vocabulary::kPad;
      weights[b] = active ? T(1) : T(0);
    }
    const auto r = nn::SoftmaxCrossEntropy<T>(logits, targets, weights, scale, cache ? &c.d_logits[t] : nullptr);
    total.loss_sum += r.loss_sum;
    total.count += r.count;
  }
  return total;
}

template <typename T>
Matrix<T> Decoder<T>::Backward(const Cache& c) const {
  const int B = c.batch.batch;
  Matrix<T> dh(B, gru_.hidden()), dh_out, dx, dh_prev;
  std::vector<T> mask(B);
  for (int t = c.batch.steps - 1; t >= 0; --t) {
    out_.Backward(c.states[t], c.d_logits[t], &dh_out);
    for (size_t i = 0; i < dh.size(); ++i) dh.data()[i] += dh_out.data()[i];
    gru_.Backward(c.steps[t], dh, &dx, &dh_prev);
    for (int b = 0; b < B; ++b) mask[b] = t < c.batch.lengths[b] ? T(1) : T(0);
    embed_.Backward(c.batch.Step(t), dx, mask);
    dh = std::move(dh_prev);
  }
  Matrix<T> d_embed;
  init_.Backward(c.embed_in, dh, &d_embed);
  return d_embed;
}

template <typename T>
std::vector<T> Decoder<T>::InitialState(std::span<const T> embed) const {
  Matrix<T> e(1, static_cast<int>(embed.size()));
  std::copy(embed.begin(), embed.end(), e.row(0).begin());
  Matrix<T> h;
  init_.Forward(e, &h);
  return h.values();
}

template <typename T>
void Decoder<T>::Step(std::span<const T> state, int token, std::vector<T>* logits,
                      std::vector<T>* next_state) const {
  Matrix<T> h(1, gru_.hidden());
  std::copy(state.begin(), state.end(), h.row(0).begin());
  Matrix<T> x, h_next, out;
  const int ids[1] = {token};
  embed_.Lookup(ids, &x);
  typename nn::GruCell<T>::Cache cache;
  gru_.Forward(x, h, &cache, &h_next);
  out_.Forward(h_next, &out);
  *logits = std::move(out.values());
  *next_state = std::move(h_next.values());
}

template <typename T>
T TripletLoss(std::span<const T> anchor, std::span<const T> positive, std::span<const T> negative,
              T margin, T scale, std::span<T> d_anchor, std::span<T> d_positive, std::span<T> d_negative) {
  const T value = nn::SquaredL2(anchor, positive) - nn::SquaredL2(anchor, negative) + margin;
  if (value <= T(0)) return T(0);
  if (scale != T(0)) {
    nn::SquaredL2Backward(anchor, positive, scale, d_anchor, d_positive);
    nn::SquaredL2Backward(anchor, negative, -scale, d_anchor, d_negative);
  }
  return value;
}

template class Encoder<float>;
template class Encoder<double>;
template class Decoder<float>;
template class Decoder<double>;
template float TripletLoss<float>(std::span<const float>, std::span<const float>, std::span<const float>,
                                  float, float, std::span<float>, std::span<float>, std::span<float>);
template double TripletLoss<double>(std::span<const double>, std::span<const double>,
                                    std::span<const double>, double, double, std::span<double>,
                                    std::span<double>, std::span<double>);

}  // namespace unicap
