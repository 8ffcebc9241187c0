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

#include "alignment/align_trainer.h"

#include <cmath>
#include <sstream>

#include "common/error.h"
#include "common/log.h"
#include "nn/adam.h"
#include "nn/checkpoint.h"

namespace unicap {

using nn::Matrix;

namespace {

constexpr uint64_t kTranslatorInitStream = 11;
constexpr uint64_t kCriticInitStream = 12;
constexpr uint64_t kShuffleStream = 3000;
constexpr uint64_t kGeneratorStream = 4000;
constexpr uint64_t kCriticStream = 5000;

template <typename T>
void AddInto(Matrix<T>& dst, const Matrix<T>& src) {
  for (size_t i = 0; i < dst.size(); ++i) dst.values()[i] += src.values()[i];
}

}  // namespace

Ablation ParseAblation(std::string_view name) {
  if (name == "align-only") return Ablation::kAlignOnly;
  if (name == "mle") return Ablation::kMle;
  if (name == "joint-l2") return Ablation::kJointL2;
  if (name == "joint-robust") return Ablation::kJointRobust;
  if (name == "joint-adv") return Ablation::kJointAdv;
  throw ValidationError("unknown ablation '" + std::string(name) +
                        "' (expected align-only, mle, joint-l2, joint-robust or joint-adv)");
}

std::string_view AblationName(Ablation a) {
  switch (a) {
    case Ablation::kAlignOnly: return "align-only";
    case Ablation::kMle: return "mle";
    case Ablation::kJointL2: return "joint-l2";
    case Ablation::kJointRobust: return "joint-robust";
    case Ablation::kJointAdv: return "joint-adv";
  }
  return "?";
}

CriticPolarity ParsePolarity(std::string_view name) {
  if (name == "standard") return CriticPolarity::kStandard;
  if (name == "swapped") return CriticPolarity::kSwapped;
  throw ValidationError("unknown critic polarity '" + std::string(name) + "' (expected standard or swapped)");
}

std::string_view PolarityName(CriticPolarity p) { return p == CriticPolarity::kStandard ? "standard" : "swapped"; }

void AlignConfig::Validate() const {
  if (K < 1) throw ValidationError("align.K must be >= 1");
  if (!(lambda_ce >= 0) || !(lambda_r >= 0) || !(lambda_adv >= 0) || !(gp_coeff >= 0)) {
    throw ValidationError("alignment loss weights must be non-negative");
  }
  if (critic_steps < 1) throw ValidationError("align.critic_steps must be >= 1");
  if (translator_hidden < 1 || critic_hidden < 1 || batch < 1 || epochs < 0) {
    throw ValidationError("alignment sizes must be positive");
  }
  if (!(lr > 0) || !(critic_lr > 0)) throw ValidationError("alignment learning rates must be > 0");
}

AlignWeights ResolveWeights(const AlignConfig& config) {
  AlignWeights w;
  switch (config.ablation) {
    case Ablation::kAlignOnly:
      w.lambda_align = config.lambda_r;
      w.robust = false;
      w.train_decoder = false;
      break;
    case Ablation::kMle:
      w.lambda_ce = config.lambda_ce;
      break;
    case Ablation::kJointL2:
      w.lambda_ce = config.lambda_ce;
      w.lambda_align = config.lambda_r;
      w.robust = false;
      break;
    case Ablation::kJointRobust:
      w.lambda_ce = config.lambda_ce;
      w.lambda_align = config.lambda_r;
      break;
    case Ablation::kJointAdv:
      w.lambda_ce = config.lambda_ce;
      w.lambda_align = config.lambda_r;
      w.lambda_adv = config.lambda_adv;
      break;
  }
  return w;
}

template <typename T>
AlignNets<T> AlignNets<T>::Create(int feature_dim, int concept_dim, const nn::ParameterStore<T>& decoder_init,
                                  const AlignConfig& config, uint64_t seed) {
  AlignNets n;
  n.decoder_store_ = decoder_init.Clone();
  n.decoder_ = Decoder<T>::Bind(n.decoder_store_);
  Rng tr_rng(DeriveSeed(seed, kTranslatorInitStream));
  n.translator_ = Translator<T>::Create(n.translator_store_, feature_dim, config.translator_hidden,
                                        n.decoder_.embed_dim(), tr_rng);
  Rng critic_rng(DeriveSeed(seed, kCriticInitStream));
  n.critic_ = Critic<T>::Create(n.critic_store_, n.decoder_.embed_dim(), concept_dim, config.critic_hidden,
                                critic_rng);
  return n;
}

template <typename T>
AlignNets<T> AlignNets<T>::FromStores(nn::ParameterStore<T> translator, nn::ParameterStore<T> decoder,
                                      nn::ParameterStore<T> critic) {
  AlignNets n;
  n.translator_store_ = std::move(translator);
  n.decoder_store_ = std::move(decoder);
  n.critic_store_ = std::move(critic);
  n.BindAll();
  return n;
}

template <typename T>
void AlignNets<T>::BindAll() {
  translator_ = Translator<T>::Bind(translator_store_);
  decoder_ = Decoder<T>::Bind(decoder_store_);
  if (translator_.out() != decoder_.embed_dim()) {
    throw ShapeError("translator output " + std::to_string(translator_.out()) + " does not match decoder input " +
                     std::to_string(decoder_.embed_dim()));
  }
  critic_ = Critic<T>::Bind(critic_store_, decoder_.embed_dim());
}

void SaveAlignNets(const std::filesystem::path& path, const AlignNets<float>& nets) {
  nn::SaveCheckpoint(path, {&nets.translator_store(), &nets.decoder_store(), &nets.critic_store()});
}

AlignNets<float> LoadAlignNets(const std::filesystem::path& path) {
  const auto store = nn::LoadCheckpoint(path);
  return AlignNets<float>::FromStores(store.Extract("tr."), store.Extract("dec."), store.Extract("critic."));
}

template <typename T>
GeneratorTerms ComputeGeneratorLoss(const AlignNets<T>& nets, const GeneratorBatch<T>& batch,
                                    const AlignWeights& weights, bool backward) {
  typename Translator<T>::Cache tcache;
  const Matrix<T> out = nets.translator().Forward(batch.features, backward ? &tcache : nullptr);
  const int B = out.rows();
  Matrix<T> d_out(B, out.cols());
  GeneratorTerms terms;

  if (weights.lambda_ce > 0) {
    size_t count = 0;
    for (const auto& c : batch.captions) count += c.size() - 1;
    typename Decoder<T>::Cache dcache;
    const auto ce = nets.decoder().ForwardTeacher(out, batch.captions,
                                                  static_cast<T>(weights.lambda_ce / count),
                                                  backward ? &dcache : nullptr);
    terms.ce = ce.loss_sum / count;
    if (backward) AddInto(d_out, nets.decoder().Backward(dcache));
  }

  if (weights.lambda_align > 0) {
    const T scale = static_cast<T>(weights.lambda_align / B);
    double sum = 0;
    for (int i = 0; i < B; ++i) {
      std::span<T> d = backward ? d_out.row(i) : std::span<T>();
      if (weights.robust) {
        sum += RobustLoss<T>(out.row(i), batch.candidates[i], scale, d).loss;
      } else {
        sum += MeanL2Loss<T>(out.row(i), batch.candidates[i], scale, d);
      }
    }
    terms.align = sum / B;
  }

  if (weights.lambda_adv > 0) {
    typename Critic<T>::Cache ccache;
    const auto scores = nets.critic().Forward(out, batch.concepts, &ccache);
    double mean = 0;
    for (T s : scores) mean += static_cast<double>(s);
    terms.adv = -mean / B;
    if (backward) {
      const std::vector<T> d_score(B, static_cast<T>(-weights.lambda_adv / B));
      Matrix<T> d_embed;
      nets.critic().Backward(ccache, d_score, &d_embed);
      AddInto(d_out, d_embed);
    }
  }

  terms.total = weights.lambda_ce * terms.ce + weights.lambda_align * terms.align + weights.lambda_adv * terms.adv;
  if (backward) nets.translator().Backward(tcache, d_out);
  return terms;
}

template <typename T>
CriticTerms ComputeCriticLoss(const AlignNets<T>& nets, const CriticBatch<T>& batch, double gp_coeff,
                              CriticPolarity polarity, bool backward) {
  const auto& critic = nets.critic();
  const int B = batch.translated.rows();
  nn::CheckSameShape(batch.translated, batch.text, "ComputeCriticLoss");
  typename Critic<T>::Cache real_cache, fake_cache;
  const auto real = critic.Forward(batch.translated, batch.concepts, &real_cache);
  const auto fake = critic.Forward(batch.text, batch.concepts, &fake_cache);
  double mean_real = 0, mean_fake = 0;
  for (int i = 0; i < B; ++i) {
    mean_real += static_cast<double>(real[i]);
    mean_fake += static_cast<double>(fake[i]);
  }
  mean_real /= B;
  mean_fake /= B;
  const double sign = polarity == CriticPolarity::kStandard ? 1.0 : -1.0;

  CriticTerms terms;
  const double main = sign * (mean_real - mean_fake);
  terms.wasserstein = -main;

  Matrix<T> interp(B, batch.translated.cols());
  for (int i = 0; i < B; ++i) {
    const T e = batch.epsilon[i];
    for (int k = 0; k < interp.cols(); ++k) {
      interp(i, k) = e * batch.translated(i, k) + (T(1) - e) * batch.text(i, k);
    }
  }
  const auto gp = critic.GradientPenalty(interp, batch.concepts, gp_coeff, T(1), backward);
  terms.gp = gp.penalty;
  terms.grad_norm = gp.mean_grad_norm;
  terms.loss = main + gp.penalty;

  if (backward) {
    critic.Backward(real_cache, std::vector<T>(B, static_cast<T>(sign / B)), nullptr);
    critic.Backward(fake_cache, std::vector<T>(B, static_cast<T>(-sign / B)), nullptr);
  }
  return terms;
}

AlignTrainResult TrainAlignment(const LanguageModel<float>& lm, const AlignInputs& inputs,
                                const AlignConfig& config, std::ostream* log,
                                const std::filesystem::path& checkpoint) {
  config.Validate();
  const Corpus& corpus = *inputs.corpus;
  const ImageSet& images = *inputs.images;
  const AssignmentGraph& graph = *inputs.graph;
  const ConceptLexicon& lex = *inputs.lexicon;
  if (graph.image_count() != images.table.count() ||
      graph.sentence_count() != static_cast<int>(corpus.records.size())) {
    throw ValidationError("assignment graph does not match the images and corpus");
  }
  const AlignWeights weights = ResolveWeights(config);
  const std::vector<int> active = graph.ActiveImages();
  if (active.empty()) throw ValidationError("no image shares a concept with any sentence");

  // Sentence embeddings from the frozen encoder.
  std::vector<int> all(corpus.records.size());
  for (size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
  const Matrix<float> text = EncodeSentences(lm.encoder(), corpus.records, all);

  const int C = static_cast<int>(lex.concept_count());
  const int F = images.table.dim();
  Matrix<float> concepts(images.table.count(), C);
  for (int i = 0; i < images.table.count(); ++i) {
    const auto v = ConceptVector(images.concepts[i], lex);
    std::copy(v.begin(), v.end(), concepts.row(i).begin());
  }

  AlignTrainResult result;
  result.nets = AlignNets<float>::Create(F, C, lm.decoder_store(), config, config.seed);
  auto& nets = result.nets;
  nn::Adam<float> tr_opt(nets.translator_store(), {.lr = config.lr});
  nn::Adam<float> dec_opt(nets.decoder_store(), {.lr = config.lr});
  nn::Adam<float> critic_opt(nets.critic_store(), {.lr = config.critic_lr});

  auto gather = [&](const std::vector<int>& rows, Matrix<float>* feats, Matrix<float>* conc) {
    feats->Reset(static_cast<int>(rows.size()), F);
    conc->Reset(static_cast<int>(rows.size()), C);
    for (size_t r = 0; r < rows.size(); ++r) {
      std::copy(images.table.features.row(rows[r]).begin(), images.table.features.row(rows[r]).end(),
                feats->row(static_cast<int>(r)).begin());
      std::copy(concepts.row(rows[r]).begin(), concepts.row(rows[r]).end(), conc->row(static_cast<int>(r)).begin());
    }
  };

  if (log) *log << "epoch\tL_CE\tL_align\tL_adv\tL_total\tcritic_loss\twasserstein\tgp\n";
  std::vector<int> order = active;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng shuffle_rng(DeriveSeed(config.seed, kShuffleStream + epoch));
    Rng gen_rng(DeriveSeed(config.seed, kGeneratorStream + epoch));
    Rng critic_rng(DeriveSeed(config.seed, kCriticStream + epoch));
    order = active;
    shuffle_rng.Shuffle(order);

    AlignEpochStats stats;
    stats.epoch = epoch;
    int gen_steps = 0, critic_updates = 0;
    for (size_t start = 0; start < order.size(); start += config.batch) {
      const size_t end = std::min(order.size(), start + config.batch);
      const std::vector<int> rows(order.begin() + start, order.begin() + end);

      if (weights.lambda_adv > 0) {
        for (int step = 0; step < config.critic_steps; ++step) {
          std::vector<int> crow(rows.size());
          for (auto& r : crow) r = active[critic_rng.UniformIndex(active.size())];
          CriticBatch<float> cb;
          Matrix<float> feats;
          gather(crow, &feats, &cb.concepts);
          cb.translated = nets.translator().Forward(feats, nullptr);
          cb.text.Reset(static_cast<int>(crow.size()), text.cols());
          for (size_t r = 0; r < crow.size(); ++r) {
            const int j = graph.Sample(crow[r], critic_rng);
            std::copy(text.row(j).begin(), text.row(j).end(), cb.text.row(static_cast<int>(r)).begin());
          }
          cb.epsilon.resize(crow.size());
          for (auto& e : cb.epsilon) e = static_cast<float>(critic_rng.Uniform());
          const auto ct = ComputeCriticLoss<float>(nets, cb, config.gp_coeff, config.polarity, true);
          if (!std::isfinite(ct.loss)) {
            throw DivergenceError("critic loss is not finite at epoch " + std::to_string(epoch));
          }
          critic_opt.Step();
          stats.critic_loss += ct.loss;
          stats.wasserstein += ct.wasserstein;
          stats.gp += ct.gp;
          ++critic_updates;
        }
      }

      GeneratorBatch<float> gb;
      gather(rows, &gb.features, &gb.concepts);
      for (int i : rows) {
        gb.captions.emplace_back(corpus.records[graph.Sample(i, gen_rng)].tokens);
        std::vector<std::span<const float>> cands;
        for (int j : graph.SampleK(i, config.K, gen_rng)) cands.push_back(text.row(j));
        gb.candidates.push_back(std::move(cands));
      }
      const auto gt = ComputeGeneratorLoss<float>(nets, gb, weights, true);
      if (!std::isfinite(gt.total)) {
        throw DivergenceError("alignment loss is not finite at epoch " + std::to_string(epoch));
      }
      nets.critic_store().ZeroGrad();
      tr_opt.Step();
      if (weights.train_decoder) {
        dec_opt.Step();
      } else {
        nets.decoder_store().ZeroGrad();
      }
      stats.ce += gt.ce;
      stats.align += gt.align;
      stats.adv += gt.adv;
      stats.total += gt.total;
      ++gen_steps;
    }
    stats.ce /= gen_steps;
    stats.align /= gen_steps;
    stats.adv /= gen_steps;
    stats.total /= gen_steps;
    if (critic_updates) {
      stats.critic_loss /= critic_updates;
      stats.wasserstein /= critic_updates;
      stats.gp /= critic_updates;
    }
    result.history.push_back(stats);
    if (log) {
      *log << stats.epoch << '\t' << stats.ce << '\t' << stats.align << '\t' << stats.adv << '\t' << stats.total
           << '\t' << stats.critic_loss << '\t' << stats.wasserstein << '\t' << stats.gp << '\n';
    }
    std::ostringstream msg;
    msg << "align epoch " << epoch << " total=" << stats.total << " ce=" << stats.ce << " align=" << stats.align
        << " adv=" << stats.adv << " critic=" << stats.critic_loss;
    LogInfo(msg.str());
    if (!checkpoint.empty()) SaveAlignNets(checkpoint, nets);
  }
  return result;
}

template class AlignNets<float>;
template class AlignNets<double>;
template GeneratorTerms ComputeGeneratorLoss<float>(const AlignNets<float>&, const GeneratorBatch<float>&,
                                                    const AlignWeights&, bool);
template GeneratorTerms ComputeGeneratorLoss<double>(const AlignNets<double>&, const GeneratorBatch<double>&,
                                                     const AlignWeights&, bool);
template CriticTerms ComputeCriticLoss<float>(const AlignNets<float>&, const CriticBatch<float>&, double,
                                              CriticPolarity, bool);
template CriticTerms ComputeCriticLoss<double>(const AlignNets<double>&, const CriticBatch<double>&, double,
                                               CriticPolarity, bool);

}  // namespace unicap
