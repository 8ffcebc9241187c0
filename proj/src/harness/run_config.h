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

#ifndef UNICAP_HARNESS_RUN_CONFIG_H_
#define UNICAP_HARNESS_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "alignment/align_trainer.h"
#include "concept_lexicon/concept_lexicon.h"
#include "inference/captioner.h"
#include "language_model/language_model.h"
#include "text_corpus/corpus.h"

namespace unicap {

struct InputPaths {
  std::string corpus;
  std::string lexicon;
  std::string features;
  std::string ids;
  std::string detections;
  std::string references;  // optional
  std::string word_vectors;  // optional
};

struct EvalOptions {
  int oracle_runs = 100;
  int mixing_k = 10;
};

// Every tunable of a run. Text form is flat "key = value" lines; '#' starts
// a comment line. Unknown or repeated keys are errors.
struct RunConfig {
  uint64_t seed = 1;
  InputPaths paths;
  LexiconOptions lexicon;
  CorpusOptions text;
  LmConfig lm;
  AlignConfig align;
  CaptionOptions decode;
  EvalOptions eval;

  // Pushes the global seed into the per-stage configs.
  void Finalize();
  void Validate() const;

  void Set(std::string_view key, std::string_view value);
  std::string Get(std::string_view key) const;
  static const std::vector<std::string>& Keys();

  // Relative paths are resolved against the file's directory.
  static RunConfig Load(const std::filesystem::path& path);
  static RunConfig Parse(std::string_view text, std::string_view source,
                         const std::filesystem::path& base_dir = {});
  // One "key = value" line per key, in Keys() order.
  std::string Echo() const;
};

}  // namespace unicap

#endif  // UNICAP_HARNESS_RUN_CONFIG_H_
