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

#ifndef UNICAP_LANGUAGE_MODEL_SEQUENCE_MODEL_H_
#define UNICAP_LANGUAGE_MODEL_SEQUENCE_MODEL_H_

#include <span>
#include <vector>

#include "nn/layers.h"
#include "nn/matrix.h"
#include "nn/parameter_store.h"

namespace unicap {

struct LmDims {
  int vocab = 0;
  int word_dim = 200;
  int hidden = 200;
  int embed_dim = 256;
};

// Padded, time-major batch of token sequences.
struct TokenBatch {
  int batch = 0;
  int steps = 0;
  std::vector<int> ids;      // ids[t * batch + b], pad where t >= lengths[b]
  std::vector<int> lengths;

  std::span<const int> Step(int t) const {
    return {ids.data() + static_cast<size_t>(t) * batch, static_cast<size_t>(batch)};
  }

  static TokenBatch FromSequences(const std::vector<std::span<const int>>& seqs);
};

// Sentence encoder: GRU over word vectors, last state projected to the
// embedding dimension. Blocks are prefixed "enc.".
template <typename T>
class Encoder {
 public:
  struct Cache {
    TokenBatch batch;
    std::vector<nn::Matrix<T>> inputs;
    std::vector<typename nn::GruCell<T>::Cache> steps;
    nn::Matrix<T> final_state;
  };

  Encoder() = default;
  static Encoder Create(nn::ParameterStore<T>& store, const LmDims& dims, Rng& rng);
  static Encoder Bind(nn::ParameterStore<T>& store);

  // seqs hold content tokens (no bos/eos); each must be nonempty.
  nn::Matrix<T> Forward(const std::vector<std::span<const int>>& seqs, Cache* cache) const;
  // Accumulates parameter gradients from dL/d(embedding).
  void Backward(const Cache& cache, const nn::Matrix<T>& d_embed) const;

  int embed_dim() const { return proj_.out(); }
  int hidden() const { return gru_.hidden(); }
  int vocab() const { return embed_.vocab(); }
  const nn::Embedding<T>& embedding() const { return embed_; }

 private:
  nn::Embedding<T> embed_;
  nn::GruCell<T> gru_;
  nn::Linear<T> proj_;
};

// Sentence decoder: initial state is a linear map of the embedding; step 0
// consumes bos and each later step the previous gold token. Blocks are
// prefixed "dec.".
template <typename T>
class Decoder {
 public:
  struct Cache {
    TokenBatch batch;
    nn::Matrix<T> embed_in;
    nn::Matrix<T> h0;
    std::vector<nn::Matrix<T>> inputs;
    std::vector<typename nn::GruCell<T>::Cache> steps;
    std::vector<nn::Matrix<T>> states;
    std::vector<nn::Matrix<T>> d_logits;
  };

  Decoder() = default;
  static Decoder Create(nn::ParameterStore<T>& store, const LmDims& dims, Rng& rng);
  static Decoder Bind(nn::ParameterStore<T>& store);

  // Teacher-forced pass over full sequences (bos ... eos). Gradients of
  // scale * summed NLL are prepared in the cache when cache is non-null.
  nn::CrossEntropyResult ForwardTeacher(const nn::Matrix<T>& embed,
                                        const std::vector<std::span<const int>>& seqs, T scale,
                                        Cache* cache) const;
  // Accumulates parameter gradients; returns dL/d(embedding).
  nn::Matrix<T> Backward(const Cache& cache) const;

  // Single-sequence stepping for inference.
  std::vector<T> InitialState(std::span<const T> embed) const;
  // Writes next-token logits and the next state.
  void Step(std::span<const T> state, int token, std::vector<T>* logits, std::vector<T>* next_state) const;

  int vocab() const { return out_.out(); }
  int embed_dim() const { return init_.in(); }
  int hidden() const { return gru_.hidden(); }
  const nn::Embedding<T>& embedding() const { return embed_; }

 private:
  nn::Linear<T> init_;
  nn::Embedding<T> embed_;
  nn::GruCell<T> gru_;
  nn::Linear<T> out_;
};

// max(0, ||a - p||^2 - ||a - n||^2 + margin). When the hinge is active and
// grads are non-empty, adds scale * dL/d{a,p,n}.
template <typename T>
T TripletLoss(std::span<const T> anchor, std::span<const T> positive, std::span<const T> negative,
              T margin, T scale = T(0), std::span<T> d_anchor = {}, std::span<T> d_positive = {},
              std::span<T> d_negative = {});

}  // namespace unicap

#endif  // UNICAP_LANGUAGE_MODEL_SEQUENCE_MODEL_H_
