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

#include "inference/captioner.h"

#include <cmath>
#include <limits>

#include "common/error.h"
#include "nn/ops.h"

namespace unicap {

DecoderStepModel::DecoderStepModel(const Decoder<float>& decoder, std::span<const float> embedding)
    : decoder_(&decoder), embedding_(embedding.begin(), embedding.end()) {
  if (static_cast<int>(embedding_.size()) != decoder.embed_dim()) {
    throw ShapeError("embedding of size " + std::to_string(embedding_.size()) + " for decoder input " +
                     std::to_string(decoder.embed_dim()));
  }
}

void DecoderStepModel::Normalize(const std::vector<float>& logits, std::vector<double>* logprobs) const {
  std::vector<double> masked(logits.begin(), logits.end());
  for (int t : {Vocabulary::kPad, Vocabulary::kBos, Vocabulary::kUnk}) {
    if (t < static_cast<int>(masked.size())) masked[t] = -std::numeric_limits<double>::infinity();
  }
  logprobs->resize(masked.size());
  nn::LogSoftmax<double>(masked, *logprobs);
}

DecoderStepModel::State DecoderStepModel::Start(std::vector<double>* logprobs) const {
  const State h0 = decoder_->InitialState(embedding_);
  return Advance(h0, Vocabulary::kBos, logprobs);
}

DecoderStepModel::State DecoderStepModel::Advance(const State& state, int token,
                                                  std::vector<double>* logprobs) const {
  std::vector<float> logits;
  State next;
  decoder_->Step(state, token, &logits, &next);
  Normalize(logits, logprobs);
  return next;
}

Captioner::Captioner(AlignNets<float> nets, Vocabulary vocab) : nets_(std::move(nets)), vocab_(std::move(vocab)) {
  if (nets_.decoder().vocab() != vocab_.size()) {
    throw ValidationError("vocabulary has " + std::to_string(vocab_.size()) + " tokens but the decoder has " +
                          std::to_string(nets_.decoder().vocab()));
  }
}

Captioner Captioner::Load(const std::filesystem::path& checkpoint, const std::filesystem::path& vocab) {
  return Captioner(LoadAlignNets(checkpoint), Vocabulary::Load(vocab));
}

nn::Matrix<float> Captioner::Translate(const nn::Matrix<float>& features) const {
  return nets_.translator().Forward(features, nullptr);
}

Hypothesis Captioner::Decode(std::span<const float> embedding, const CaptionOptions& options) const {
  DecoderStepModel model(nets_.decoder(), embedding);
  DecodeOptions d;
  d.beam = options.beam;
  d.max_len = options.max_len;
  d.eos = Vocabulary::kEos;
  d.masked = {Vocabulary::kPad, Vocabulary::kBos, Vocabulary::kUnk};
  d.length_norm = options.length_norm;
  return BeamSearch(model, d);
}

std::string Captioner::Caption(std::span<const float> feature, const CaptionOptions& options) const {
  nn::Matrix<float> x(1, static_cast<int>(feature.size()));
  std::copy(feature.begin(), feature.end(), x.values().begin());
  const auto e = Translate(x);
  return vocab_.Decode(Decode(e.row(0), options).tokens);
}

std::vector<std::pair<std::string, std::string>> Captioner::CaptionAll(const FeatureTable& table,
                                                                       const CaptionOptions& options) const {
  if (table.dim() != nets_.translator().in()) {
    throw ValidationError("features have dimension " + std::to_string(table.dim()) + " but the translator expects " +
                          std::to_string(nets_.translator().in()));
  }
  const auto embeddings = Translate(table.features);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(table.ids.size());
  for (int i = 0; i < table.count(); ++i) {
    out.emplace_back(table.ids[i], vocab_.Decode(Decode(embeddings.row(i), options).tokens));
  }
  return out;
}

}  // namespace unicap
