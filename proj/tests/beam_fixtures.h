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

#ifndef UNICAP_TESTS_BEAM_FIXTURES_H_
#define UNICAP_TESTS_BEAM_FIXTURES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "common/rng.h"
#include "inference/beam_search.h"

namespace unicap::testing {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Next-token distribution is an arbitrary function of the prefix.
class TableModel {
 public:
  using State = std::vector<int>;
  using Table = std::function<std::vector<double>(const std::vector<int>&)>;

  TableModel(int vocab, Table table) : vocab_(vocab), table_(std::move(table)) {}
  int vocab_size() const { return vocab_; }
  State Start(std::vector<double>* lp) const {
    *lp = table_({});
    ++calls;
    return {};
  }
  State Advance(const State& s, int token, std::vector<double>* lp) const {
    State next = s;
    next.push_back(token);
    *lp = table_(next);
    ++calls;
    return next;
  }
  mutable int calls = 0;

 private:
  int vocab_;
  Table table_;
};

inline std::vector<double> Logs(std::vector<double> p) {
  for (auto& v : p) v = v > 0 ? std::log(v) : kNegInf;
  return p;
}

// Random normalized table keyed on the prefix; some entries are exact ties.
inline TableModel RandomTable(int vocab, uint64_t seed) {
  return TableModel(vocab, [vocab, seed](const std::vector<int>& prefix) {
    uint64_t h = seed;
    for (int t : prefix) h = DeriveSeed(h, static_cast<uint64_t>(t) + 1);
    Rng rng(h);
    std::vector<double> w(vocab);
    for (auto& v : w) v = 1 + static_cast<double>(rng.UniformIndex(6));
    double s = 0;
    for (double v : w) s += v;
    for (auto& v : w) v /= s;
    return Logs(w);
  });
}

// Every terminal sequence of length <= max_len, best by score then lexicographic.
inline Hypothesis Exhaustive(const TableModel& m, const DecodeOptions& o) {
  Hypothesis best;
  bool have = false;
  auto consider = [&](Hypothesis h) {
    if (!have || internal::BetterFinal(h, best, o.length_norm)) best = std::move(h), have = true;
  };
  std::function<void(std::vector<int>, double, std::vector<double>)> rec = [&](std::vector<int> prefix, double score,
                                                                               std::vector<double> lp) {
    if (static_cast<int>(prefix.size()) == o.max_len) {
      prefix.push_back(o.eos);
      consider({prefix, score, true});
      return;
    }
    for (int t = 0; t < m.vocab_size(); ++t) {
      if (std::find(o.masked.begin(), o.masked.end(), t) != o.masked.end() || lp[t] == kNegInf) continue;
      auto next = prefix;
      next.push_back(t);
      if (t == o.eos) {
        consider({next, score + lp[t], false});
        continue;
      }
      std::vector<double> nlp;
      m.Advance(prefix, t, &nlp);
      rec(next, score + lp[t], nlp);
    }
  };
  std::vector<double> lp;
  m.Start(&lp);
  rec({}, 0, lp);
  return best;
}

}  // namespace unicap::testing

#endif  // UNICAP_TESTS_BEAM_FIXTURES_H_
