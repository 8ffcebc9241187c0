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

#ifndef UNICAP_INFERENCE_BEAM_SEARCH_H_
#define UNICAP_INFERENCE_BEAM_SEARCH_H_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <vector>

#include "common/error.h"

namespace unicap {

// A left-to-right token model. Start(&logprobs) returns the initial state
// and the log-probabilities of the first token; Advance(state, token,
// &logprobs) returns the state after token and the log-probabilities of
// the following one.
template <typename M>
concept StepModel = requires(const M& m, const typename M::State& s, int token, std::vector<double>* lp) {
  { m.vocab_size() } -> std::convertible_to<int>;
  { m.Start(lp) } -> std::same_as<typename M::State>;
  { m.Advance(s, token, lp) } -> std::same_as<typename M::State>;
};

struct DecodeOptions {
  int beam = 3;
  int max_len = 20;
  int eos = 2;
  // Tokens that are never emitted.
  std::vector<int> masked;
  // Rank finished hypotheses by score / length instead of score.
  bool length_norm = false;
};

struct Hypothesis {
  std::vector<int> tokens;  // emitted tokens, ending with eos
  double score = 0;         // summed log-probability of the emitted tokens
  // eos was appended at max_len rather than emitted.
  bool truncated = false;
};

namespace internal {

inline double RankScore(const Hypothesis& h, bool length_norm) {
  return length_norm ? h.score / static_cast<double>(h.tokens.size()) : h.score;
}

// Higher score first; ties go to the lexicographically smaller sequence.
inline bool BetterFinal(const Hypothesis& a, const Hypothesis& b, bool length_norm) {
  const double sa = RankScore(a, length_norm), sb = RankScore(b, length_norm);
  if (sa != sb) return sa > sb;
  return a.tokens < b.tokens;
}

}  // namespace internal

// Beam search keeping the top `beam` expansions at each step; expansions
// that emit eos leave the beam as finished hypotheses. Hypotheses alive at
// max_len are closed with an unscored eos. beam = 1 is greedy decoding.
template <StepModel M>
Hypothesis BeamSearch(const M& model, const DecodeOptions& options) {
  if (options.beam < 1) throw ValidationError("beam width must be >= 1");
  if (options.max_len < 1) throw ValidationError("max_len must be >= 1");
  const int V = model.vocab_size();
  std::vector<bool> allowed(V, true);
  for (int t : options.masked)
    if (t >= 0 && t < V) allowed[t] = false;

  struct Live {
    std::vector<int> tokens;
    double score;
    typename M::State state;
    std::vector<double> next;  // log-probabilities of the next token
  };
  std::vector<Live> live;
  {
    Live root{{}, 0.0, {}, {}};
    root.state = model.Start(&root.next);
    live.push_back(std::move(root));
  }
  std::vector<Hypothesis> finished;

  struct Candidate {
    double score;
    int parent;
    int token;
  };
  std::vector<Candidate> cands;
  for (int step = 0; step < options.max_len && !live.empty(); ++step) {
    cands.clear();
    for (int p = 0; p < static_cast<int>(live.size()); ++p) {
      for (int tok = 0; tok < V; ++tok) {
        if (!allowed[tok]) continue;
        const double lp = live[p].next[tok];
        if (lp == -std::numeric_limits<double>::infinity()) continue;
        cands.push_back({live[p].score + lp, p, tok});
      }
    }
    const size_t keep = std::min(cands.size(), static_cast<size_t>(options.beam));
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.token != b.token) return a.token < b.token;
      return a.parent < b.parent;
    });
    std::vector<Live> next_live;
    for (size_t c = 0; c < keep; ++c) {
      const auto& cand = cands[c];
      std::vector<int> tokens = live[cand.parent].tokens;
      tokens.push_back(cand.token);
      if (cand.token == options.eos) {
        finished.push_back({std::move(tokens), cand.score, false});
        continue;
      }
      Live child{std::move(tokens), cand.score, {}, {}};
      if (step + 1 < options.max_len) {
        child.state = model.Advance(live[cand.parent].state, cand.token, &child.next);
      }
      next_live.push_back(std::move(child));
    }
    live = std::move(next_live);
  }
  for (auto& l : live) {
    l.tokens.push_back(options.eos);
    finished.push_back({std::move(l.tokens), l.score, true});
  }
  if (finished.empty()) throw ValidationError("every token is masked");
  return *std::min_element(finished.begin(), finished.end(), [&](const Hypothesis& a, const Hypothesis& b) {
    return internal::BetterFinal(a, b, options.length_norm);
  });
}

// Argmax decoding, written separately from the beam for cross-checking.
template <StepModel M>
Hypothesis GreedyDecode(const M& model, const DecodeOptions& options) {
  const int V = model.vocab_size();
  std::vector<bool> allowed(V, true);
  for (int t : options.masked)
    if (t >= 0 && t < V) allowed[t] = false;
  Hypothesis h;
  std::vector<double> next;
  auto state = model.Start(&next);
  for (int step = 0; step < options.max_len; ++step) {
    int best = -1;
    for (int tok = 0; tok < V; ++tok) {
      if (!allowed[tok] || next[tok] == -std::numeric_limits<double>::infinity()) continue;
      if (best < 0 || next[tok] > next[best]) best = tok;
    }
    if (best < 0) throw ValidationError("every token is masked");
    h.tokens.push_back(best);
    h.score += next[best];
    if (best == options.eos) return h;
    if (step + 1 < options.max_len) state = model.Advance(state, best, &next);
  }
  h.tokens.push_back(options.eos);
  h.truncated = true;
  return h;
}

}  // namespace unicap

#endif  // UNICAP_INFERENCE_BEAM_SEARCH_H_
