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

#include "text_corpus/corpus.h"

#include <fstream>
#include <map>

#include "common/error.h"
#include "common/strings.h"
#include "text_corpus/tokenizer.h"

namespace unicap {

std::string SentenceRecord::Text() const { return Join(words, " "); }

std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

Corpus BuildCorpus(const std::filesystem::path& path, const ConceptLexicon& lex,
                   const CorpusOptions& options) {
  const auto lines = ReadLines(path);
  return BuildCorpusFromLines(lines, lex, options);
}

Corpus BuildCorpusFromLines(std::span<const std::string> lines, const ConceptLexicon& lex,
                            const CorpusOptions& options) {
  if (options.max_len < 4) throw ValidationError("max_len must be >= 4");
  if (options.min_count < 1) throw ValidationError("min_count must be >= 1");

  Corpus corpus;
  std::map<std::string, int64_t> counts;
  for (size_t i = 0; i < lines.size(); ++i) {
    auto words = Tokenize(lines[i]);
    if (words.empty()) continue;
    if (static_cast<int>(words.size()) > options.max_len) words.resize(options.max_len);
    SentenceRecord rec;
    rec.id = static_cast<int>(corpus.records.size());
    rec.line = static_cast<int>(i);
    auto mentioned = lex.ExtractSequence(words);
    if (!mentioned.empty()) rec.primary_concept = mentioned.front();
    rec.concepts = ConceptSet(std::move(mentioned));
    for (const auto& w : words) ++counts[w];
    rec.words = std::move(words);
    corpus.records.push_back(std::move(rec));
  }
  if (corpus.records.empty()) throw ValidationError("corpus is empty");

  corpus.vocab = Vocabulary::FromCounts(counts, options.min_count);
  for (auto& rec : corpus.records) {
    rec.tokens.reserve(rec.words.size() + 2);
    rec.tokens.push_back(Vocabulary::kBos);
    for (const auto& w : rec.words) rec.tokens.push_back(corpus.vocab.Id(w));
    rec.tokens.push_back(Vocabulary::kEos);
  }
  return corpus;
}

}  // namespace unicap
