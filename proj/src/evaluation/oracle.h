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

#ifndef UNICAP_EVALUATION_ORACLE_H_
#define UNICAP_EVALUATION_ORACLE_H_

#include <vector>

#include "alignment/assignment_graph.h"
#include "common/rng.h"
#include "evaluation/eval_report.h"
#include "evaluation/metrics.h"

namespace unicap {

// Per image, the sentences tied at the maximal edge weight, ascending.
// Empty for images without edges.
std::vector<std::vector<int>> MaxWeightSentences(const AssignmentGraph& graph);

struct OracleResult {
  EvalReport report;               // metrics of the best run
  int best_run = 0;                // first run reaching the best score
  std::vector<double> run_scores;  // BLEU-4 per run
  std::vector<int> images;         // scored images, ascending
  std::vector<int> chosen;         // best run's sentence per scored image
  int excluded = 0;                // images without edges
};

// Picks, for every image with edges, one sentence uniformly among its
// maximal-weight ties, scores the corpus by BLEU-4 and keeps the best of
// `runs` repetitions. references are indexed by image.
OracleResult OracleBaseline(const AssignmentGraph& graph, const std::vector<Tokens>& sentences,
                            const std::vector<std::vector<Tokens>>& references, int runs, Rng& rng);

}  // namespace unicap

#endif  // UNICAP_EVALUATION_ORACLE_H_
