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

#ifndef UNICAP_ALIGNMENT_ALIGN_TRAINER_H_
#define UNICAP_ALIGNMENT_ALIGN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "alignment/assignment_graph.h"
#include "alignment/image_data.h"
#include "alignment/networks.h"
#include "language_model/language_model.h"

namespace unicap {

enum class Ablation { kAlignOnly, kMle, kJointL2, kJointRobust, kJointAdv };
Ablation ParseAblation(std::string_view name);
std::string_view AblationName(Ablation a);

// Which sign convention the critic is trained with. kStandard: the critic
// raises scores of sentence embeddings and lowers scores of translated
// features. kSwapped raises the translated scores instead; the translator's
// adversarial term is -D(T(v), c) in both cases.
enum class CriticPolarity { kStandard, kSwapped };
CriticPolarity ParsePolarity(std::string_view name);
std::string_view PolarityName(CriticPolarity p);

struct AlignConfig {
  int K = 10;
  double lambda_ce = 1.0;
  double lambda_r = 1.0;
  double lambda_adv = 0.1;
  double gp_coeff = 10.0;
  int critic_steps = 5;
  int translator_hidden = 512;
  int critic_hidden = 256;
  double lr = 1e-3;
  double critic_lr = 1e-4;
  int batch = 64;
  int epochs = 20;
  Ablation ablation = Ablation::kJointAdv;
  CriticPolarity polarity = CriticPolarity::kStandard;
  uint64_t seed = 1;

  void Validate() const;
};

// Loss weights and switches after applying the ablation.
struct AlignWeights {
  double lambda_ce = 0;
  double lambda_align = 0;
  double lambda_adv = 0;
  bool robust = true;  // min over candidates; mean otherwise
  bool train_decoder = true;
};
AlignWeights ResolveWeights(const AlignConfig& config);

// Translator, decoder and critic parameters.
template <typename T>
class AlignNets {
 public:
  AlignNets() = default;
  AlignNets(AlignNets&&) noexcept = default;
  AlignNets& operator=(AlignNets&&) noexcept = default;

  // The decoder starts from a copy of decoder_init.
  static AlignNets Create(int feature_dim, int concept_dim, const nn::ParameterStore<T>& decoder_init,
                          const AlignConfig& config, uint64_t seed);
  static AlignNets FromStores(nn::ParameterStore<T> translator, nn::ParameterStore<T> decoder,
                              nn::ParameterStore<T> critic);

  nn::ParameterStore<T>& translator_store() { return translator_store_; }
  nn::ParameterStore<T>& decoder_store() { return decoder_store_; }
  nn::ParameterStore<T>& critic_store() { return critic_store_; }
  const nn::ParameterStore<T>& translator_store() const { return translator_store_; }
  const nn::ParameterStore<T>& decoder_store() const { return decoder_store_; }
  const nn::ParameterStore<T>& critic_store() const { return critic_store_; }
  const Translator<T>& translator() const { return translator_; }
  const Decoder<T>& decoder() const { return decoder_; }
  const Critic<T>& critic() const { return critic_; }

 private:
  void BindAll();

  nn::ParameterStore<T> translator_store_, decoder_store_, critic_store_;
  Translator<T> translator_;
  Decoder<T> decoder_;
  Critic<T> critic_;
};

void SaveAlignNets(const std::filesystem::path& path, const AlignNets<float>& nets);
AlignNets<float> LoadAlignNets(const std::filesystem::path& path);

template <typename T>
struct GeneratorBatch {
  nn::Matrix<T> features;                               // [B x F]
  nn::Matrix<T> concepts;                               // [B x C]
  std::vector<std::span<const int>> captions;           // bos ... eos, one per row
  std::vector<std::vector<std::span<const T>>> candidates;  // K per row
};

struct GeneratorTerms {
  double ce = 0;
  double align = 0;
  double adv = 0;
  double total = 0;
};

// lambda_ce * L_CE + lambda_align * L_R (or L2 mean) + lambda_adv * -D(T(v), c),
// each averaged over the batch. With backward set, gradients go to the
// translator and decoder; the critic also receives gradients, which callers
// discard.
template <typename T>
GeneratorTerms ComputeGeneratorLoss(const AlignNets<T>& nets, const GeneratorBatch<T>& batch,
                                    const AlignWeights& weights, bool backward);

template <typename T>
struct CriticBatch {
  nn::Matrix<T> translated;  // T(v), constants here
  nn::Matrix<T> text;        // sampled sentence embeddings
  nn::Matrix<T> concepts;
  std::vector<T> epsilon;    // interpolation weight per row
};

struct CriticTerms {
  double loss = 0;
  // Quantity the critic maximizes: mean score gap between the two sides.
  double wasserstein = 0;
  double gp = 0;
  double grad_norm = 0;
};

template <typename T>
CriticTerms ComputeCriticLoss(const AlignNets<T>& nets, const CriticBatch<T>& batch, double gp_coeff,
                              CriticPolarity polarity, bool backward);

struct AlignEpochStats {
  int epoch = 0;
  double ce = 0, align = 0, adv = 0, total = 0;
  double critic_loss = 0, wasserstein = 0, gp = 0;
};

struct AlignInputs {
  const Corpus* corpus = nullptr;
  const ImageSet* images = nullptr;
  const AssignmentGraph* graph = nullptr;
  const ConceptLexicon* lexicon = nullptr;
};

struct AlignTrainResult {
  AlignNets<float> nets;
  std::vector<AlignEpochStats> history;
};

// Per-epoch TSV records go to log; the networks are checkpointed to
// checkpoint after every epoch when it is non-empty.
AlignTrainResult TrainAlignment(const LanguageModel<float>& lm, const AlignInputs& inputs,
                                const AlignConfig& config, std::ostream* log = nullptr,
                                const std::filesystem::path& checkpoint = {});

}  // namespace unicap

#endif  // UNICAP_ALIGNMENT_ALIGN_TRAINER_H_
