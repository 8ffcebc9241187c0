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

#ifndef UNICAP_INFERENCE_CAPTIONER_H_
#define UNICAP_INFERENCE_CAPTIONER_H_

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "alignment/align_trainer.h"
#include "alignment/image_data.h"
#include "inference/beam_search.h"
#include "language_model/sequence_model.h"
#include "text_corpus/vocabulary.h"

namespace unicap {

// Decoder conditioned on one embedding, exposed as a StepModel. pad, bos and
// unk logits are masked before normalization.
class DecoderStepModel {
 public:
  using State = std::vector<float>;

  DecoderStepModel(const Decoder<float>& decoder, std::span<const float> embedding);

  int vocab_size() const { return decoder_->vocab(); }
  State Start(std::vector<double>* logprobs) const;
  State Advance(const State& state, int token, std::vector<double>* logprobs) const;

 private:
  void Normalize(const std::vector<float>& logits, std::vector<double>* logprobs) const;

  const Decoder<float>* decoder_;
  std::vector<float> embedding_;
};

struct CaptionOptions {
  int beam = 3;
  int max_len = 20;
  bool length_norm = false;
};

class Captioner {
 public:
  Captioner(AlignNets<float> nets, Vocabulary vocab);
  // Alignment checkpoint plus the vocabulary it was trained with.
  static Captioner Load(const std::filesystem::path& checkpoint, const std::filesystem::path& vocab);

  nn::Matrix<float> Translate(const nn::Matrix<float>& features) const;
  Hypothesis Decode(std::span<const float> embedding, const CaptionOptions& options) const;
  // Caption text without bos/eos.
  std::string Caption(std::span<const float> feature, const CaptionOptions& options) const;
  std::vector<std::pair<std::string, std::string>> CaptionAll(const FeatureTable& table,
                                                              const CaptionOptions& options) const;

  const AlignNets<float>& nets() const { return nets_; }
  const Vocabulary& vocab() const { return vocab_; }

 private:
  AlignNets<float> nets_;
  Vocabulary vocab_;
};

}  // namespace unicap

#endif  // UNICAP_INFERENCE_CAPTIONER_H_
