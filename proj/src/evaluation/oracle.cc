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

#include "evaluation/oracle.h"

#include <algorithm>
#include <map>
#include <string>

#include "common/error.h"
#include "common/strings.h"

namespace unicap {

std::vector<std::vector<int>> MaxWeightSentences(const AssignmentGraph& graph) {
  std::vector<std::vector<int>> out(graph.image_count());
  for (int i = 0; i < graph.image_count(); ++i) {
    uint32_t best = 0;
    for (const auto& e : graph.Edges(i)) best = std::max(best, e.weight);
    for (const auto& e : graph.Edges(i))
      if (e.weight == best) out[i].push_back(static_cast<int>(e.sentence));
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

OracleResult OracleBaseline(const AssignmentGraph& graph, const std::vector<Tokens>& sentences,
                            const std::vector<std::vector<Tokens>>& references, int runs, Rng& rng) {
  if (runs < 1) throw ValidationError("oracle needs at least one run");
  if (static_cast<int>(sentences.size()) != graph.sentence_count()) {
    throw ValidationError("graph has " + std::to_string(graph.sentence_count()) + " sentences, got " +
                          std::to_string(sentences.size()));
  }
  if (static_cast<int>(references.size()) != graph.image_count()) {
    throw ValidationError("graph has " + std::to_string(graph.image_count()) + " images, got references for " +
                          std::to_string(references.size()));
  }
  const auto ties = MaxWeightSentences(graph);
  OracleResult result;
  for (int i = 0; i < graph.image_count(); ++i) {
    if (ties[i].empty()) {
      ++result.excluded;
      continue;
    }
    if (references[i].empty()) throw ValidationError("image " + std::to_string(i) + " has no reference");
    result.images.push_back(i);
  }
  // Statistics per (image, tied sentence), computed once.
  std::vector<std::map<int, BleuStats>> stats(graph.image_count());
  for (int i : result.images) {
    for (int s : ties[i]) stats[i][s].Add(sentences[s], references[i]);
  }
  double best = -1;
  std::vector<int> choice(result.images.size());
  for (int run = 0; run < runs; ++run) {
    BleuStats total;
    for (size_t k = 0; k < result.images.size(); ++k) {
      const auto& t = ties[result.images[k]];
      choice[k] = t.size() == 1 ? t[0] : t[rng.UniformIndex(t.size())];
      total += stats[result.images[k]][choice[k]];
    }
    const double score = BleuFromStats(total, 4);
    result.run_scores.push_back(score);
    if (score > best) {
      best = score;
      result.best_run = run;
      result.chosen = choice;
    }
  }
  std::vector<Tokens> cands;
  std::vector<std::vector<Tokens>> refs;
  std::vector<std::string> generated, training;
  for (size_t k = 0; k < result.images.size(); ++k) {
    cands.push_back(sentences[result.chosen[k]]);
    refs.push_back(references[result.images[k]]);
    generated.push_back(Join(cands.back(), " "));
  }
  for (const auto& s : sentences) training.push_back(Join(s, " "));
  BleuStats total;
  for (size_t k = 0; k < cands.size(); ++k) total.Add(cands[k], refs[k]);
  auto& r = result.report;
  for (int n = 1; n <= kMaxBleuOrder; ++n) r.bleu[n - 1] = BleuFromStats(total, n);
  r.rouge_l = CorpusRougeL(cands, refs);
  const auto un = UniqueNovelRates(generated, training);
  r.unique_rate = un.unique_rate;
  r.novel_rate = un.novel_rate;
  r.candidates = static_cast<int64_t>(cands.size());
  return result;
}

}  // namespace unicap
