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

#ifndef UNICAP_HARNESS_STAGES_H_
#define UNICAP_HARNESS_STAGES_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "alignment/align_trainer.h"
#include "alignment/assignment_graph.h"
#include "alignment/image_data.h"
#include "evaluation/eval_report.h"
#include "evaluation/mixing.h"
#include "evaluation/oracle.h"
#include "harness/run_config.h"
#include "harness/synthetic_world.h"
#include "language_model/language_model.h"

namespace unicap {

namespace fs = std::filesystem;

// Files stored next to a checkpoint: its vocabulary and training log.
fs::path VocabPath(const fs::path& checkpoint);
fs::path TrainLogPath(const fs::path& checkpoint);
fs::path PairIndexPath(const fs::path& checkpoint);

// Merges lexicon files, validates and writes the canonical form.
struct LexiconSummary {
  int surfaces = 0;
  int concepts = 0;
};
LexiconSummary BuildLexicon(const std::vector<fs::path>& inputs, const fs::path& out, const LexiconOptions& options);

// Writes checkpoint, vocabulary, pair index and epoch log.
LmTrainResult TrainLmStage(const fs::path& corpus, const fs::path& lexicon, const RunConfig& config,
                           const fs::path& out);

// Image concepts from ids + detections, in id-file order.
std::vector<ConceptSet> LoadImageConcepts(const fs::path& ids, const fs::path& detections, const ConceptLexicon& lex);
AssignmentGraph BuildGraphStage(const fs::path& corpus, const fs::path& lexicon, const fs::path& ids,
                                const fs::path& detections, const RunConfig& config, const fs::path& out);

struct AlignStageInputs {
  fs::path corpus, lexicon, features, ids, detections, graph, lm;
};
// Writes checkpoint, vocabulary copy and epoch log.
AlignTrainResult TrainAlignStage(const AlignStageInputs& in, const RunConfig& config, const fs::path& out);

// Vocabulary defaults to the checkpoint's sidecar.
std::vector<std::pair<std::string, std::string>> CaptionStage(const fs::path& features, const fs::path& ids,
                                                              const fs::path& checkpoint, const CaptionOptions& options,
                                                              const fs::path& out, const fs::path& vocab = {});

// references and training are optional (empty path). Without references
// only the unique/novel rates are filled in.
EvalReport EvaluateStage(const fs::path& candidates, const fs::path& references, const fs::path& training,
                         const fs::path& out);

// First label of each image that resolves to a concept; "" when none.
std::vector<std::string> DominantImageConcepts(const std::vector<std::string>& ids, const fs::path& detections,
                                               const ConceptLexicon& lex);

struct EmbeddingDiagnostics {
  MixingResult mixing;
  double text_ratio = 0;   // intra/inter ratio of sentence embeddings by primary concept
  double joint_ratio = 0;  // same over sentences and translated images
  int sentences = 0;
  int images = 0;

  nlohmann::json ToJson() const;
};
EmbeddingDiagnostics DiagnoseEmbedding(const LanguageModel<float>& lm, const Corpus& corpus,
                                       const Translator<float>& translator, const FeatureTable& images,
                                       const std::vector<std::string>& image_labels, int k);

struct DiagnoseInputs {
  fs::path lm, align, corpus, lexicon, features, ids, detections;
};
EmbeddingDiagnostics DiagnoseStage(const DiagnoseInputs& in, const RunConfig& config, const fs::path& out);

void SynthStage(const SynthOptions& options, const fs::path& out_dir);

}  // namespace unicap

#endif  // UNICAP_HARNESS_STAGES_H_
