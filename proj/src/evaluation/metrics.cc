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

#include "evaluation/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <unordered_set>

#include "common/error.h"

namespace unicap {
namespace {

using NgramCounts = std::map<std::vector<std::string>, int64_t>;

NgramCounts CountNgrams(const Tokens& tokens, int n) {
  NgramCounts counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

void CheckOrder(int n) {
  if (n < 1 || n > kMaxBleuOrder) throw ValidationError("BLEU order must be in 1..4, got " + std::to_string(n));
}

}  // namespace

void BleuStats::Add(const Tokens& candidate, const std::vector<Tokens>& references) {
  if (references.empty()) throw ValidationError("candidate without references");
  for (int n = 1; n <= kMaxBleuOrder; ++n) {
    const auto cand = CountNgrams(candidate, n);
    NgramCounts max_ref;
    for (const auto& r : references) {
      for (const auto& [gram, c] : CountNgrams(r, n)) max_ref[gram] = std::max(max_ref[gram], c);
    }
    for (const auto& [gram, c] : cand) {
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) matches[n - 1] += std::min(c, it->second);
      totals[n - 1] += c;
    }
  }
  // Closest reference length; the shorter one on a tie.
  const int64_t c = static_cast<int64_t>(candidate.size());
  int64_t best = -1;
  for (const auto& r : references) {
    const int64_t len = static_cast<int64_t>(r.size());
    const auto gap = std::llabs(len - c), best_gap = std::llabs(best - c);
    if (best < 0 || gap < best_gap || (gap == best_gap && len < best)) {
      best = len;
    }
  }
  candidate_length += c;
  reference_length += best;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int i = 0; i < kMaxBleuOrder; ++i) {
    matches[i] += other.matches[i];
    totals[i] += other.totals[i];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

double BleuFromStats(const BleuStats& stats, int n) {
  CheckOrder(n);
  if (stats.candidate_length == 0) return 0;
  double log_sum = 0;
  for (int i = 0; i < n; ++i) {
    if (stats.matches[i] == 0) return 0;
    log_sum += std::log(static_cast<double>(stats.matches[i]) / static_cast<double>(stats.totals[i]));
  }
  const double c = static_cast<double>(stats.candidate_length), r = static_cast<double>(stats.reference_length);
  const double log_bp = c < r ? 1 - r / c : 0;
  return std::exp(log_bp + log_sum / n);
}

double CorpusBleu(const std::vector<Tokens>& candidates, const std::vector<std::vector<Tokens>>& references, int n) {
  CheckOrder(n);
  if (candidates.size() != references.size()) {
    throw ValidationError(std::to_string(candidates.size()) + " candidates but " + std::to_string(references.size()) +
                          " reference sets");
  }
  BleuStats stats;
  for (size_t i = 0; i < candidates.size(); ++i) stats.Add(candidates[i], references[i]);
  return BleuFromStats(stats, n);
}

double SmoothedSentenceBleu(const Tokens& candidate, const std::vector<Tokens>& references, int n) {
  CheckOrder(n);
  BleuStats s;
  s.Add(candidate, references);
  if (s.candidate_length == 0 || s.matches[0] == 0) return 0;
  double log_sum = 0;
  for (int i = 0; i < n; ++i) {
    const double add = i == 0 ? 0 : 1;
    log_sum += std::log((s.matches[i] + add) / (s.totals[i] + add));
  }
  const double c = static_cast<double>(s.candidate_length), r = static_cast<double>(s.reference_length);
  return std::exp((c < r ? 1 - r / c : 0) + log_sum / n);
}

int LongestCommonSubsequence(const Tokens& a, const Tokens& b) {
  std::vector<int> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double RougeL(const Tokens& candidate, const std::vector<Tokens>& references, double beta) {
  if (references.empty()) throw ValidationError("candidate without references");
  double best = 0;
  for (const auto& r : references) {
    const int lcs = LongestCommonSubsequence(candidate, r);
    if (lcs == 0) continue;
    const double p = static_cast<double>(lcs) / candidate.size();
    const double rec = static_cast<double>(lcs) / r.size();
    const double b2 = beta * beta;
    best = std::max(best, (1 + b2) * p * rec / (rec + b2 * p));
  }
  return best;
}

double CorpusRougeL(const std::vector<Tokens>& candidates, const std::vector<std::vector<Tokens>>& references) {
  if (candidates.size() != references.size()) throw ValidationError("candidate and reference counts differ");
  if (candidates.empty()) return 0;
  double sum = 0;
  for (size_t i = 0; i < candidates.size(); ++i) sum += RougeL(candidates[i], references[i]);
  return sum / candidates.size();
}

UniqueNovel UniqueNovelRates(const std::vector<std::string>& generated, const std::vector<std::string>& training) {
  UniqueNovel out;
  if (generated.empty()) return out;
  const std::unordered_set<std::string> distinct(generated.begin(), generated.end());
  const std::unordered_set<std::string> seen(training.begin(), training.end());
  size_t novel = 0;
  for (const auto& g : generated) novel += seen.count(g) == 0;
  out.unique_rate = static_cast<double>(distinct.size()) / generated.size();
  out.novel_rate = static_cast<double>(novel) / generated.size();
  return out;
}

}  // namespace unicap
