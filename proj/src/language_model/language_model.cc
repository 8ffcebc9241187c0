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

#include "language_model/language_model.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "common/error.h"
#include "common/log.h"
#include "nn/adam.h"
#include "nn/checkpoint.h"

namespace unicap {

using nn::Matrix;

namespace {

constexpr uint64_t kInitStream = 1;
constexpr uint64_t kShuffleStream = 1000;
constexpr uint64_t kTripletStream = 2000;
constexpr int kRatioSampleLimit = 1000;

}  // namespace

void LmConfig::Validate() const {
  if (word_dim <= 0 || hidden <= 0 || embed_dim <= 0 || batch <= 0 || epochs < 0) {
    throw ValidationError("language model dimensions, batch and epochs must be positive");
  }
  if (!(margin > 0)) throw ValidationError("lm.margin must be > 0");
  if (!(lambda_t >= 0)) throw ValidationError("lm.lambda_t must be >= 0");
  if (!(lr_enc > 0) || !(lr_dec > 0)) throw ValidationError("learning rates must be > 0");
}

template <typename T>
LanguageModel<T> LanguageModel<T>::Create(int vocab_size, const LmConfig& config, uint64_t seed) {
  config.Validate();
  LmDims dims{vocab_size, config.word_dim, config.hidden, config.embed_dim};
  Rng rng(DeriveSeed(seed, kInitStream));
  LanguageModel m;
  m.encoder_ = Encoder<T>::Create(m.encoder_store_, dims, rng);
  m.decoder_ = Decoder<T>::Create(m.decoder_store_, dims, rng);
  return m;
}

template <typename T>
LanguageModel<T> LanguageModel<T>::FromStores(nn::ParameterStore<T> encoder_store,
                                              nn::ParameterStore<T> decoder_store) {
  LanguageModel m;
  m.encoder_store_ = std::move(encoder_store);
  m.decoder_store_ = std::move(decoder_store);
  m.encoder_ = Encoder<T>::Bind(m.encoder_store_);
  m.decoder_ = Decoder<T>::Bind(m.decoder_store_);
  if (m.encoder_.embed_dim() != m.decoder_.embed_dim() || m.encoder_.vocab() != m.decoder_.vocab()) {
    throw ShapeError("encoder and decoder checkpoints do not match");
  }
  return m;
}

template <typename T>
LanguageModel<T> LanguageModel<T>::FromStore(const nn::ParameterStore<float>& store) {
  return FromStores(store.Extract("enc.").template Cast<T>(), store.Extract("dec.").template Cast<T>());
}

template <typename T>
LmDims LanguageModel<T>::dims() const {
  return {encoder_.vocab(), encoder_.embedding().dim(), encoder_.hidden(), encoder_.embed_dim()};
}

std::span<const int> ContentTokens(const SentenceRecord& record) {
  return std::span<const int>(record.tokens).subspan(1, record.tokens.size() - 2);
}

template <typename T>
LmLossTerms ComputeLmLoss(LanguageModel<T>& model, std::span<const SentenceRecord> records,
                          std::span<const int> anchors,
                          std::span<const std::optional<TripletSample>> triplets, double lambda_t,
                          double margin, bool backward) {
  if (!triplets.empty() && triplets.size() != anchors.size()) {
    throw ShapeError("triplets must be parallel to anchors");
  }
  const bool use_triplets = lambda_t > 0 && !triplets.empty();

  // Rows to encode: anchors first, then any extra positives/negatives.
  std::vector<int> rows(anchors.begin(), anchors.end());
  std::map<int, int> row_of;
  for (size_t i = 0; i < rows.size(); ++i) row_of.emplace(rows[i], static_cast<int>(i));
  auto row_for = [&](int id) {
    auto [it, inserted] = row_of.emplace(id, static_cast<int>(rows.size()));
    if (inserted) rows.push_back(id);
    return it->second;
  };
  struct TripletRows {
    int a, p, n;
  };
  std::vector<TripletRows> trows;
  if (use_triplets) {
    for (size_t i = 0; i < anchors.size(); ++i) {
      if (!triplets[i]) continue;
      trows.push_back({static_cast<int>(i), row_for(triplets[i]->positive), row_for(triplets[i]->negative)});
    }
  }

  std::vector<std::span<const int>> enc_inputs;
  for (int id : rows) enc_inputs.push_back(ContentTokens(records[id]));
  typename Encoder<T>::Cache enc_cache;
  const Matrix<T> embeddings = model.encoder().Forward(enc_inputs, backward ? &enc_cache : nullptr);

  const int n_anchor = static_cast<int>(anchors.size());
  Matrix<T> anchor_embed(n_anchor, embeddings.cols());
  std::vector<std::span<const int>> dec_targets;
  size_t token_count = 0;
  for (int i = 0; i < n_anchor; ++i) {
    std::copy(embeddings.row(i).begin(), embeddings.row(i).end(), anchor_embed.row(i).begin());
    dec_targets.emplace_back(records[anchors[i]].tokens);
    token_count += records[anchors[i]].tokens.size() - 1;
  }
  const T ce_scale = T(1) / static_cast<T>(token_count);
  typename Decoder<T>::Cache dec_cache;
  const auto ce = model.decoder().ForwardTeacher(anchor_embed, dec_targets, ce_scale,
                                                 backward ? &dec_cache : nullptr);

  LmLossTerms terms;
  terms.ce = ce.loss_sum / static_cast<double>(ce.count);
  Matrix<T> d_embed(embeddings.rows(), embeddings.cols());
  if (use_triplets && !trows.empty()) {
    terms.triplet_count = static_cast<int>(trows.size());
    const T scale = backward ? static_cast<T>(lambda_t / trows.size()) : T(0);
    double sum = 0;
    for (const auto& t : trows) {
      sum += static_cast<double>(TripletLoss<T>(embeddings.row(t.a), embeddings.row(t.p), embeddings.row(t.n),
                                                static_cast<T>(margin), scale, d_embed.row(t.a),
                                                d_embed.row(t.p), d_embed.row(t.n)));
    }
    terms.triplet = sum / trows.size();
    terms.total = terms.ce + lambda_t * terms.triplet;
  } else {
    terms.total = terms.ce;
  }

  if (backward) {
    const Matrix<T> d_anchor = model.decoder().Backward(dec_cache);
    for (int i = 0; i < n_anchor; ++i) {
      auto dst = d_embed.row(i);
      auto src = d_anchor.row(i);
      for (size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
    model.encoder().Backward(enc_cache, d_embed);
  }
  return terms;
}

template <typename T>
Matrix<T> EncodeSentences(const Encoder<T>& encoder, std::span<const SentenceRecord> records,
                          std::span<const int> ids, int batch_size) {
  Matrix<T> out(static_cast<int>(ids.size()), encoder.embed_dim());
  for (size_t start = 0; start < ids.size(); start += batch_size) {
    const size_t end = std::min(ids.size(), start + batch_size);
    std::vector<std::span<const int>> seqs;
    for (size_t i = start; i < end; ++i) seqs.push_back(ContentTokens(records[ids[i]]));
    const Matrix<T> e = encoder.Forward(seqs, nullptr);
    for (size_t i = start; i < end; ++i) {
      std::copy(e.row(static_cast<int>(i - start)).begin(), e.row(static_cast<int>(i - start)).end(),
                out.row(static_cast<int>(i)).begin());
    }
  }
  return out;
}

double IntraInterDistanceRatio(const Matrix<float>& embeddings, const std::vector<std::string>& labels) {
  double intra = 0, inter = 0;
  int64_t n_intra = 0, n_inter = 0;
  const int n = embeddings.rows();
  for (int i = 0; i < n; ++i) {
    if (labels[i].empty()) continue;
    for (int j = i + 1; j < n; ++j) {
      if (labels[j].empty()) continue;
      const double d = std::sqrt(static_cast<double>(nn::SquaredL2<float>(embeddings.row(i), embeddings.row(j))));
      if (labels[i] == labels[j]) {
        intra += d;
        ++n_intra;
      } else {
        inter += d;
        ++n_inter;
      }
    }
  }
  if (n_intra == 0 || n_inter == 0 || inter == 0) return std::numeric_limits<double>::quiet_NaN();
  return (intra / n_intra) / (inter / n_inter);
}

LmTrainResult TrainLanguageModel(const Corpus& corpus, const PairIndex& index, const LmConfig& config,
                                 std::ostream* log) {
  config.Validate();
  if (index.sentence_count() != corpus.records.size()) {
    throw ValidationError("pair index does not match the corpus");
  }
  LmTrainResult result;
  result.model = LanguageModel<float>::Create(corpus.vocab.size(), config, config.seed);
  if (!config.word_vectors.empty()) {
    const int loaded = LoadWordVectors(config.word_vectors, corpus.vocab, result.model);
    LogInfo("loaded " + std::to_string(loaded) + " pretrained word vectors");
  }
  auto& model = result.model;
  nn::Adam<float> enc_opt(model.encoder_store(), {.lr = config.lr_enc});
  nn::Adam<float> dec_opt(model.decoder_store(), {.lr = config.lr_dec});

  // Fixed subsample for the structure diagnostic.
  std::vector<int> probe_ids;
  std::vector<std::string> probe_labels;
  {
    std::vector<int> labeled;
    for (const auto& r : corpus.records)
      if (!r.primary_concept.empty()) labeled.push_back(r.id);
    const size_t stride = std::max<size_t>(1, (labeled.size() + kRatioSampleLimit - 1) / kRatioSampleLimit);
    for (size_t i = 0; i < labeled.size(); i += stride) {
      probe_ids.push_back(labeled[i]);
      probe_labels.push_back(corpus.records[labeled[i]].primary_concept);
    }
  }

  if (log) *log << "epoch\tL_CE\tL_t\tratio_intra_inter\n";
  const int n = static_cast<int>(corpus.records.size());
  std::vector<int> order(n);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng shuffle_rng(DeriveSeed(config.seed, kShuffleStream + epoch));
    Rng triplet_rng(DeriveSeed(config.seed, kTripletStream + epoch));
    shuffle_rng.Shuffle(order);

    double ce_sum = 0, t_sum = 0;
    int batches = 0, t_batches = 0;
    for (int start = 0; start < n; start += config.batch) {
      const int end = std::min(n, start + config.batch);
      std::span<const int> anchors(order.data() + start, end - start);
      std::vector<std::optional<TripletSample>> triplets;
      if (config.lambda_t > 0) {
        for (int a : anchors) triplets.push_back(SampleTriplet(a, index, triplet_rng));
      }
      const auto terms = ComputeLmLoss<float>(model, corpus.records, anchors, triplets, config.lambda_t,
                                              config.margin, true);
      if (!std::isfinite(terms.total)) {
        throw DivergenceError("language model loss is not finite at epoch " + std::to_string(epoch));
      }
      enc_opt.Step();
      dec_opt.Step();
      ce_sum += terms.ce;
      ++batches;
      if (terms.triplet_count > 0) {
        t_sum += terms.triplet;
        ++t_batches;
      }
    }

    LmEpochStats stats;
    stats.epoch = epoch;
    stats.ce = batches ? ce_sum / batches : 0.0;
    stats.triplet = t_batches ? t_sum / t_batches : 0.0;
    const auto probe = EncodeSentences(model.encoder(), corpus.records, probe_ids);
    stats.ratio_intra_inter = IntraInterDistanceRatio(probe, probe_labels);
    result.history.push_back(stats);
    if (log) {
      *log << stats.epoch << '\t' << stats.ce << '\t' << stats.triplet << '\t' << stats.ratio_intra_inter << '\n';
    }
    std::ostringstream msg;
    msg << "lm epoch " << epoch << " L_CE=" << stats.ce << " L_t=" << stats.triplet
        << " ratio=" << stats.ratio_intra_inter;
    LogInfo(msg.str());
  }
  return result;
}

int LoadWordVectors(const std::filesystem::path& path, const Vocabulary& vocab, LanguageModel<float>& model) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word vectors " + path.string());
  auto& enc = model.encoder_store().Get("enc.embed");
  auto& dec = model.decoder_store().Get("dec.embed");
  const int dim = static_cast<int>(enc.shape[1]);
  int loaded = 0;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    std::vector<float> v;
    float x;
    while (ss >> x) v.push_back(x);
    if (static_cast<int>(v.size()) != dim) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " values, got " + std::to_string(v.size()));
    }
    if (!vocab.Contains(word)) continue;
    const size_t id = static_cast<size_t>(vocab.Id(word));
    std::copy(v.begin(), v.end(), enc.value.begin() + id * dim);
    std::copy(v.begin(), v.end(), dec.value.begin() + id * dim);
    ++loaded;
  }
  return loaded;
}

void SaveLanguageModel(const std::filesystem::path& path, const LanguageModel<float>& model) {
  nn::SaveCheckpoint(path, {&model.encoder_store(), &model.decoder_store()});
}

LanguageModel<float> LoadLanguageModel(const std::filesystem::path& path) {
  return LanguageModel<float>::FromStore(nn::LoadCheckpoint(path));
}

template class LanguageModel<float>;
template class LanguageModel<double>;
template LmLossTerms ComputeLmLoss<float>(LanguageModel<float>&, std::span<const SentenceRecord>,
                                          std::span<const int>, std::span<const std::optional<TripletSample>>,
                                          double, double, bool);
template LmLossTerms ComputeLmLoss<double>(LanguageModel<double>&, std::span<const SentenceRecord>,
                                           std::span<const int>, std::span<const std::optional<TripletSample>>,
                                           double, double, bool);
template Matrix<float> EncodeSentences<float>(const Encoder<float>&, std::span<const SentenceRecord>,
                                              std::span<const int>, int);
template Matrix<double> EncodeSentences<double>(const Encoder<double>&, std::span<const SentenceRecord>,
                                                std::span<const int>, int);

}  // namespace unicap
