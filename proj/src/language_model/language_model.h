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

#ifndef UNICAP_LANGUAGE_MODEL_LANGUAGE_MODEL_H_
#define UNICAP_LANGUAGE_MODEL_LANGUAGE_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "language_model/sequence_model.h"
#include "nn/parameter_store.h"
#include "text_corpus/corpus.h"
#include "text_corpus/pair_index.h"

namespace unicap {

struct LmConfig {
  int word_dim = 200;
  int hidden = 200;
  int embed_dim = 256;
  double margin = 0.5;
  double lambda_t = 0.1;
  int batch = 64;
  double lr_enc = 1e-4;
  double lr_dec = 1e-3;
  int epochs = 20;
  uint64_t seed = 1;
  // Optional GloVe-style text file: word followed by word_dim floats.
  std::string word_vectors;

  void Validate() const;
};

// Sentence autoencoder: encoder and decoder parameters in separate stores so
// they can be optimized (and frozen) independently.
template <typename T>
class LanguageModel {
 public:
  LanguageModel() = default;
  LanguageModel(LanguageModel&&) noexcept = default;
  LanguageModel& operator=(LanguageModel&&) noexcept = default;

  static LanguageModel Create(int vocab_size, const LmConfig& config, uint64_t seed);
  // Takes the "enc." and "dec." blocks of a checkpoint store.
  static LanguageModel FromStore(const nn::ParameterStore<float>& store);

  template <typename U>
  LanguageModel<U> Cast() const {
    return LanguageModel<U>::FromStores(encoder_store_.template Cast<U>(), decoder_store_.template Cast<U>());
  }
  static LanguageModel FromStores(nn::ParameterStore<T> encoder_store, nn::ParameterStore<T> decoder_store);

  nn::ParameterStore<T>& encoder_store() { return encoder_store_; }
  nn::ParameterStore<T>& decoder_store() { return decoder_store_; }
  const nn::ParameterStore<T>& encoder_store() const { return encoder_store_; }
  const nn::ParameterStore<T>& decoder_store() const { return decoder_store_; }
  const Encoder<T>& encoder() const { return encoder_; }
  const Decoder<T>& decoder() const { return decoder_; }
  LmDims dims() const;

 private:
  nn::ParameterStore<T> encoder_store_;
  nn::ParameterStore<T> decoder_store_;
  Encoder<T> encoder_;
  Decoder<T> decoder_;
};

// Content tokens of a record (between bos and eos).
std::span<const int> ContentTokens(const SentenceRecord& record);

struct LmLossTerms {
  double ce = 0;       // mean per-word NLL of the anchors' reconstructions
  double triplet = 0;  // mean triplet loss over anchors that have one
  double total = 0;    // ce + lambda_t * triplet
  int triplet_count = 0;
};

// L_LM for one batch. triplets is either empty or parallel to anchors
// (nullopt entries contribute reconstruction only). With backward set,
// gradients of `total` are accumulated into both stores.
template <typename T>
LmLossTerms ComputeLmLoss(LanguageModel<T>& model, std::span<const SentenceRecord> records,
                          std::span<const int> anchors,
                          std::span<const std::optional<TripletSample>> triplets, double lambda_t,
                          double margin, bool backward);

// Embeddings of the given sentences, encoded in batches of batch_size.
template <typename T>
nn::Matrix<T> EncodeSentences(const Encoder<T>& encoder, std::span<const SentenceRecord> records,
                              std::span<const int> ids, int batch_size = 64);

// Mean L2 distance between same-label pairs divided by the mean over
// different-label pairs, over all pairs. Empty labels are ignored. Returns
// NaN when either kind of pair is missing.
double IntraInterDistanceRatio(const nn::Matrix<float>& embeddings, const std::vector<std::string>& labels);

struct LmEpochStats {
  int epoch = 0;
  double ce = 0;
  double triplet = 0;
  double ratio_intra_inter = 0;
};

struct LmTrainResult {
  LanguageModel<float> model;
  std::vector<LmEpochStats> history;
};

// Trains with Adam (separate encoder/decoder learning rates). Writes one
// tab-separated record per epoch to log when non-null. Throws
// DivergenceError on a non-finite loss.
LmTrainResult TrainLanguageModel(const Corpus& corpus, const PairIndex& index, const LmConfig& config,
                                 std::ostream* log = nullptr);

// Copies vectors of in-vocabulary words into both embedding tables.
// Returns the number of words loaded.
int LoadWordVectors(const std::filesystem::path& path, const Vocabulary& vocab, LanguageModel<float>& model);

void SaveLanguageModel(const std::filesystem::path& path, const LanguageModel<float>& model);
LanguageModel<float> LoadLanguageModel(const std::filesystem::path& path);

}  // namespace unicap

#endif  // UNICAP_LANGUAGE_MODEL_LANGUAGE_MODEL_H_
