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

#ifndef UNICAP_TEXT_CORPUS_CORPUS_H_
#define UNICAP_TEXT_CORPUS_CORPUS_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "concept_lexicon/concept_lexicon.h"
#include "text_corpus/vocabulary.h"

namespace unicap {

struct SentenceRecord {
  int id = 0;
  // Zero-based line in the source file.
  int line = 0;
  // bos, content ids..., eos.
  std::vector<int> tokens;
  // Content tokens before unk replacement (after truncation).
  std::vector<std::string> words;
  ConceptSet concepts;
  // First concept mentioned; empty when the sentence has none.
  std::string primary_concept;

  int length() const { return static_cast<int>(words.size()); }
  std::string Text() const;
};

struct CorpusOptions {
  int min_count = 5;
  // Maximum number of content tokens; longer sentences are truncated.
  int max_len = 20;
};

struct Corpus {
  Vocabulary vocab;
  std::vector<SentenceRecord> records;
};

// Blank lines (nothing left after tokenization) are skipped, so record ids
// and line numbers can differ.
Corpus BuildCorpus(const std::filesystem::path& path, const ConceptLexicon& lex,
                   const CorpusOptions& options);
Corpus BuildCorpusFromLines(std::span<const std::string> lines, const ConceptLexicon& lex,
                            const CorpusOptions& options);

std::vector<std::string> ReadLines(const std::filesystem::path& path);

}  // namespace unicap

#endif  // UNICAP_TEXT_CORPUS_CORPUS_H_
