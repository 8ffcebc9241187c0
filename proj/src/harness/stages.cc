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

#include "harness/stages.h"

#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "common/error.h"
#include "common/log.h"
#include "common/strings.h"
#include "text_corpus/pair_index.h"

namespace unicap {
namespace {

fs::path WithSuffix(const fs::path& p, const char* suffix) {
  fs::path out = p;
  out += suffix;
  return out;
}

std::ofstream OpenOut(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::vector<ConceptSet> SentenceConcepts(const Corpus& corpus) {
  std::vector<ConceptSet> out;
  out.reserve(corpus.records.size());
  for (const auto& r : corpus.records) out.push_back(r.concepts);
  return out;
}

}  // namespace

fs::path VocabPath(const fs::path& checkpoint) { return WithSuffix(checkpoint, ".vocab"); }
fs::path TrainLogPath(const fs::path& checkpoint) { return WithSuffix(checkpoint, ".log"); }
fs::path PairIndexPath(const fs::path& checkpoint) { return WithSuffix(checkpoint, ".pidx"); }

LexiconSummary BuildLexicon(const std::vector<fs::path>& inputs, const fs::path& out, const LexiconOptions& options) {
  if (inputs.empty()) throw ValidationError("build-lexicon needs at least one input");
  std::string merged;
  for (const auto& p : inputs) {
    // Parse each file alone first so errors carry its own line numbers.
    ConceptLexicon::Load(p, options);
    for (const auto& line : ReadLines(p)) merged += line + "\n";
  }
  std::istringstream in(merged);
  const auto lex = ConceptLexicon::Parse(in, "merged lexicon", options);
  auto f = OpenOut(out);
  lex.Write(f);
  if (!f) throw IoError("write failed: " + out.string());
  return {static_cast<int>(lex.surface_count()), static_cast<int>(lex.concept_count())};
}

LmTrainResult TrainLmStage(const fs::path& corpus_path, const fs::path& lexicon, const RunConfig& config,
                           const fs::path& out) {
  const auto lex = ConceptLexicon::Load(lexicon, config.lexicon);
  const Corpus corpus = BuildCorpus(corpus_path, lex, config.text);
  const auto index = PairIndex::Build(SentenceConcepts(corpus));
  auto log = OpenOut(TrainLogPath(out));
  auto result = TrainLanguageModel(corpus, index, config.lm, &log);
  SaveLanguageModel(out, result.model);
  corpus.vocab.Save(VocabPath(out));
  index.Save(PairIndexPath(out));
  return result;
}

std::vector<ConceptSet> LoadImageConcepts(const fs::path& ids_path, const fs::path& detections,
                                          const ConceptLexicon& lex) {
  const auto det = ReadDetections(detections);
  std::vector<ConceptSet> out;
  for (const auto& id : ReadLines(ids_path)) {
    if (Trim(id).empty()) continue;
    auto it = det.find(std::string(Trim(id)));
    out.push_back(it == det.end() ? ConceptSet() : ResolveDetections(it->second, lex));
  }
  return out;
}

AssignmentGraph BuildGraphStage(const fs::path& corpus_path, const fs::path& lexicon, const fs::path& ids,
                                const fs::path& detections, const RunConfig& config, const fs::path& out) {
  const auto lex = ConceptLexicon::Load(lexicon, config.lexicon);
  const Corpus corpus = BuildCorpus(corpus_path, lex, config.text);
  const auto images = LoadImageConcepts(ids, detections, lex);
  const auto sentences = SentenceConcepts(corpus);
  auto graph = AssignmentGraph::Build(images, sentences);
  if (!out.empty()) {
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    graph.Save(out);
  }
  return graph;
}

AlignTrainResult TrainAlignStage(const AlignStageInputs& in, const RunConfig& config, const fs::path& out) {
  const auto lex = ConceptLexicon::Load(in.lexicon, config.lexicon);
  const Corpus corpus = BuildCorpus(in.corpus, lex, config.text);
  const auto images = LoadImages(in.features, in.ids, in.detections, lex);
  const auto graph = AssignmentGraph::Load(in.graph);
  if (graph.image_count() != images.table.count() ||
      graph.sentence_count() != static_cast<int>(corpus.records.size())) {
    throw ValidationError("graph " + in.graph.string() + " is " + std::to_string(graph.image_count()) + " x " +
                          std::to_string(graph.sentence_count()) + " but the inputs have " +
                          std::to_string(images.table.count()) + " images and " +
                          std::to_string(corpus.records.size()) + " sentences");
  }
  const auto lm = LoadLanguageModel(in.lm);
  if (lm.encoder().vocab() != corpus.vocab.size()) {
    throw ValidationError("language model vocabulary (" + std::to_string(lm.encoder().vocab()) +
                          ") does not match the corpus vocabulary (" + std::to_string(corpus.vocab.size()) + ")");
  }
  AlignInputs inputs{&corpus, &images, &graph, &lex};
  auto log = OpenOut(TrainLogPath(out));
  auto result = TrainAlignment(lm, inputs, config.align, &log, out);
  SaveAlignNets(out, result.nets);
  corpus.vocab.Save(VocabPath(out));
  return result;
}

std::vector<std::pair<std::string, std::string>> CaptionStage(const fs::path& features, const fs::path& ids,
                                                              const fs::path& checkpoint, const CaptionOptions& options,
                                                              const fs::path& out, const fs::path& vocab) {
  const auto captioner = Captioner::Load(checkpoint, vocab.empty() ? VocabPath(checkpoint) : vocab);
  const auto table = ReadFeatures(features, ids);
  auto rows = captioner.CaptionAll(table, options);
  if (!out.empty()) {
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    WriteIdTextPairs(out, rows);
  }
  return rows;
}

EvalReport EvaluateStage(const fs::path& candidates, const fs::path& references, const fs::path& training,
                         const fs::path& out) {
  const auto cands = ReadIdTextPairs(candidates);
  std::vector<std::string> train;
  if (!training.empty()) train = ReadLines(training);
  const auto report = references.empty() ? DescribeCaptions(cands, train)
                                         : EvaluateCaptions(cands, ReadIdTextPairs(references), train);
  if (!out.empty()) WriteReport(out, report);
  return report;
}

std::vector<std::string> DominantImageConcepts(const std::vector<std::string>& ids, const fs::path& detections,
                                               const ConceptLexicon& lex) {
  const auto det = ReadDetections(detections);
  std::vector<std::string> out;
  for (const auto& id : ids) {
    std::string label;
    auto it = det.find(id);
    if (it != det.end()) {
      for (const auto& raw : it->second) {
        const auto c = ResolveDetections({raw}, lex);
        if (c.empty()) continue;
        // A surface form or concept id maps to one concept before expansion.
        const auto direct = lex.Lookup(ToLower(raw));
        label = direct ? *direct : (c.Contains(raw) ? raw : *c.begin());
        break;
      }
    }
    out.push_back(label);
  }
  return out;
}

nlohmann::json EmbeddingDiagnostics::ToJson() const {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["mixing_score"] = num(mixing.score);
  j["mixing_images_scored"] = mixing.images_scored;
  j["mixing_clusters_skipped"] = mixing.clusters_skipped;
  j["text_intra_inter_ratio"] = num(text_ratio);
  j["joint_intra_inter_ratio"] = num(joint_ratio);
  j["sentences"] = sentences;
  j["images"] = images;
  return j;
}

EmbeddingDiagnostics DiagnoseEmbedding(const LanguageModel<float>& lm, const Corpus& corpus,
                                       const Translator<float>& translator, const FeatureTable& images,
                                       const std::vector<std::string>& image_labels, int k) {
  if (static_cast<int>(image_labels.size()) != images.count()) throw ValidationError("one label per image required");
  std::vector<int> all(corpus.records.size());
  std::iota(all.begin(), all.end(), 0);
  const auto text = EncodeSentences(lm.encoder(), corpus.records, all);
  const auto img = translator.Forward(images.features, nullptr);
  if (text.cols() != img.cols()) {
    throw ShapeError("sentence embeddings have width " + std::to_string(text.cols()) + ", translated images " +
                     std::to_string(img.cols()));
  }
  std::map<std::string, int> ids;
  auto id_of = [&](const std::string& label) {
    if (label.empty()) return -1;
    return ids.emplace(label, static_cast<int>(ids.size())).first->second;
  };
  std::vector<int> tl, il;
  std::vector<std::string> text_labels;
  for (const auto& r : corpus.records) {
    tl.push_back(id_of(r.primary_concept));
    text_labels.push_back(r.primary_concept);
  }
  for (const auto& l : image_labels) il.push_back(id_of(l));

  EmbeddingDiagnostics d;
  d.mixing = MixingScore(text, tl, img, il, k);
  d.text_ratio = IntraInterDistanceRatio(text, text_labels);
  nn::Matrix<float> joint(text.rows() + img.rows(), text.cols());
  std::copy(text.values().begin(), text.values().end(), joint.values().begin());
  std::copy(img.values().begin(), img.values().end(), joint.values().begin() + text.values().size());
  auto joint_labels = text_labels;
  joint_labels.insert(joint_labels.end(), image_labels.begin(), image_labels.end());
  d.joint_ratio = IntraInterDistanceRatio(joint, joint_labels);
  d.sentences = text.rows();
  d.images = img.rows();
  return d;
}

EmbeddingDiagnostics DiagnoseStage(const DiagnoseInputs& in, const RunConfig& config, const fs::path& out) {
  const auto lex = ConceptLexicon::Load(in.lexicon, config.lexicon);
  const Corpus corpus = BuildCorpus(in.corpus, lex, config.text);
  const auto lm = LoadLanguageModel(in.lm);
  const auto nets = LoadAlignNets(in.align);
  const auto table = ReadFeatures(in.features, in.ids);
  const auto labels = DominantImageConcepts(table.ids, in.detections, lex);
  const auto d = DiagnoseEmbedding(lm, corpus, nets.translator(), table, labels, config.eval.mixing_k);
  if (!out.empty()) {
    auto f = OpenOut(out);
    f << d.ToJson().dump(2) << '\n';
  }
  return d;
}

void SynthStage(const SynthOptions& options, const fs::path& out_dir) { WriteWorld(GenerateWorld(options), out_dir); }

}  // namespace unicap
