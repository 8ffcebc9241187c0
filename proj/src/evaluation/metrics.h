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

#ifndef UNICAP_EVALUATION_METRICS_H_
#define UNICAP_EVALUATION_METRICS_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace unicap {

using Tokens = std::vector<std::string>;

constexpr int kMaxBleuOrder = 4;

// Clipped n-gram counts for one or more candidates.
struct BleuStats {
  std::array<int64_t, kMaxBleuOrder> matches{};
  std::array<int64_t, kMaxBleuOrder> totals{};
  int64_t candidate_length = 0;
  int64_t reference_length = 0;  // closest reference length, summed

  void Add(const Tokens& candidate, const std::vector<Tokens>& references);
  BleuStats& operator+=(const BleuStats& other);
};

// Geometric mean of the modified precisions of orders 1..n times the
// brevity penalty. Any zero precision gives 0; no smoothing.
double BleuFromStats(const BleuStats& stats, int n);

// Corpus BLEU-n. Every candidate needs at least one reference.
double CorpusBleu(const std::vector<Tokens>& candidates, const std::vector<std::vector<Tokens>>& references, int n);

// Debugging aid only: add-one smoothing on orders >= 2.
double SmoothedSentenceBleu(const Tokens& candidate, const std::vector<Tokens>& references, int n);

int LongestCommonSubsequence(const Tokens& a, const Tokens& b);

// LCS F-measure with recall weighted by beta, best over the references.
double RougeL(const Tokens& candidate, const std::vector<Tokens>& references, double beta = 1.2);

// Mean sentence ROUGE-L over the corpus.
double CorpusRougeL(const std::vector<Tokens>& candidates, const std::vector<std::vector<Tokens>>& references);

struct UniqueNovel {
  double unique_rate = 0;
  double novel_rate = 0;
};

// Exact string comparison.
UniqueNovel UniqueNovelRates(const std::vector<std::string>& generated, const std::vector<std::string>& training);

}  // namespace unicap

#endif  // UNICAP_EVALUATION_METRICS_H_
