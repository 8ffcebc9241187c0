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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "alignment/align_trainer.h"
#include "beam_fixtures.h"
#include "common/rng.h"
#include "doctest.h"
#include "inference/beam_search.h"
#include "inference/captioner.h"
#include "language_model/language_model.h"
#include "test_util.h"

namespace unicap {
namespace {

using testing::Exhaustive;
using testing::kNegInf;
using testing::Logs;
using testing::RandomTable;
using testing::TableModel;

// Straightforward beam: at each depth list every one-token extension of
// every live prefix, sort, keep the first B.
Hypothesis ReferenceBeam(const TableModel& m, const DecodeOptions& o) {
  struct H {
    std::vector<int> seq;
    double score;
    int parent_rank;
  };
  std::vector<H> live = {{{}, 0, 0}};
  std::vector<Hypothesis> done;
  for (int depth = 0; depth < o.max_len && !live.empty(); ++depth) {
    std::vector<H> ext;
    for (size_t p = 0; p < live.size(); ++p) {
      std::vector<double> lp;
      if (live[p].seq.empty()) {
        m.Start(&lp);
      } else {
        std::vector<int> head(live[p].seq.begin(), live[p].seq.end() - 1);
        m.Advance(head, live[p].seq.back(), &lp);
      }
      for (int t = 0; t < m.vocab_size(); ++t) {
        if (std::find(o.masked.begin(), o.masked.end(), t) != o.masked.end() || lp[t] == kNegInf) continue;
        auto s = live[p].seq;
        s.push_back(t);
        ext.push_back({s, live[p].score + lp[t], static_cast<int>(p)});
      }
    }
    std::stable_sort(ext.begin(), ext.end(), [](const H& a, const H& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.seq.back() != b.seq.back()) return a.seq.back() < b.seq.back();
      return a.parent_rank < b.parent_rank;
    });
    if (static_cast<int>(ext.size()) > o.beam) ext.resize(o.beam);
    live.clear();
    for (auto& e : ext) {
      if (e.seq.back() == o.eos) {
        done.push_back({e.seq, e.score, false});
      } else {
        live.push_back(e);
      }
    }
  }
  for (auto& l : live) {
    l.seq.push_back(o.eos);
    done.push_back({l.seq, l.score, true});
  }
  return *std::min_element(done.begin(), done.end(), [&](const Hypothesis& a, const Hypothesis& b) {
    return internal::BetterFinal(a, b, o.length_norm);
  });
}

// pad 0, bos 1, eos 2, a 3, b 4. Greedy takes "a" first; the best sequence
// is "b eos".
TableModel HandTable() {
  return TableModel(5, [](const std::vector<int>& prefix) {
    if (prefix.empty()) return Logs({0, 0, 0.1, 0.5, 0.4});
    if (prefix.back() == 3) return Logs({0, 0, 0.4, 0.3, 0.3});
    return Logs({0, 0, 0.9, 0.05, 0.05});
  });
}

DecodeOptions Opts(int beam, int max_len) {
  DecodeOptions o;
  o.beam = beam;
  o.max_len = max_len;
  o.eos = 2;
  o.masked = {0, 1};
  return o;
}

TEST_CASE("beam two recovers the better caption that greedy misses") {
  const auto m = HandTable();
  const auto greedy = GreedyDecode(m, Opts(1, 3));
  CHECK(greedy.tokens == std::vector<int>{3, 2});
  CHECK(greedy.score == doctest::Approx(std::log(0.5 * 0.4)).epsilon(1e-12));
  const auto b1 = BeamSearch(m, Opts(1, 3));
  CHECK(b1.tokens == greedy.tokens);
  const auto b2 = BeamSearch(m, Opts(2, 3));
  CHECK(b2.tokens == std::vector<int>{4, 2});
  CHECK(b2.score == doctest::Approx(std::log(0.4 * 0.9)).epsilon(1e-12));
  CHECK_FALSE(b2.truncated);
  const auto ex = Exhaustive(m, Opts(2, 3));
  CHECK(ex.tokens == b2.tokens);
}

TEST_CASE("hypotheses alive at max_len are closed with an unscored eos") {
  // eos is never likely: every hypothesis runs to max_len.
  TableModel m(4, [](const std::vector<int>&) { return Logs({0, 0, 0.01, 0.99}); });
  const auto h = BeamSearch(m, Opts(2, 4));
  CHECK(h.truncated);
  CHECK(h.tokens == std::vector<int>{3, 3, 3, 3, 2});
  CHECK(h.score == doctest::Approx(4 * std::log(0.99)).epsilon(1e-12));
  const auto g = GreedyDecode(m, Opts(1, 4));
  CHECK(g.tokens == h.tokens);
  CHECK(g.truncated);
}

TEST_CASE("exact ties resolve to the smaller token") {
  TableModel m(5, [](const std::vector<int>& prefix) {
    if (prefix.empty()) return Logs({0, 0, 0, 0.5, 0.5});
    return Logs({0, 0, 1, 0, 0});
  });
  for (int beam : {1, 2, 3}) {
    const auto h = BeamSearch(m, Opts(beam, 3));
    CHECK(h.tokens == std::vector<int>{3, 2});
  }
}

TEST_CASE("wide beam equals exhaustive search on random tables") {
  int checked = 0;
  for (uint64_t seed = 1; seed <= 200; ++seed) {
    const auto m = RandomTable(6, seed);
    // 4 emittable tokens, depth 3: at most 4^3 = 64 live prefixes.
    const auto o = Opts(64, 3);
    const auto beam = BeamSearch(m, o);
    const auto ex = Exhaustive(m, o);
    CHECK(beam.tokens == ex.tokens);
    CHECK(beam.score == doctest::Approx(ex.score).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("narrow beams match a reference beam and never beat exhaustive") {
  for (uint64_t seed = 1; seed <= 200; ++seed) {
    const auto m = RandomTable(6, seed);
    const auto best = Exhaustive(m, Opts(64, 4));
    for (int beam : {1, 2, 3, 4, 8}) {
      const auto o = Opts(beam, 4);
      const auto got = BeamSearch(m, o);
      const auto ref = ReferenceBeam(m, o);
      CHECK(got.tokens == ref.tokens);
      CHECK(got.truncated == ref.truncated);
      CHECK(got.score == doctest::Approx(ref.score).epsilon(1e-12));
      CHECK(got.score <= best.score + 1e-12);
    }
    CHECK(BeamSearch(m, Opts(1, 4)).tokens == GreedyDecode(m, Opts(1, 4)).tokens);
  }
}

TEST_CASE("a wider beam can return a worse caption") {
  // Greedy finishes "a eos" at 0.2. With B=2 both children of "b" (0.225)
  // push "a eos" out of the beam, and every continuation of "b" is weak.
  TableModel m(5, [](const std::vector<int>& prefix) {
    if (prefix.empty()) return Logs({0, 0, 0.05, 0.5, 0.45});
    if (prefix.size() == 1 && prefix[0] == 3) return Logs({0, 0, 0.4, 0.3, 0.3});
    if (prefix.size() == 1) return Logs({0, 0, 0, 0.5, 0.5});
    return Logs({0, 0, 0.1, 0.45, 0.45});
  });
  const auto b1 = BeamSearch(m, Opts(1, 3));
  const auto b2 = BeamSearch(m, Opts(2, 3));
  CHECK(b1.tokens == std::vector<int>{3, 2});
  CHECK(b1.score == doctest::Approx(std::log(0.2)).epsilon(1e-12));
  CHECK(b2.score < b1.score);
  CHECK(b2.score == doctest::Approx(ReferenceBeam(m, Opts(2, 3)).score).epsilon(1e-12));
  CHECK(Exhaustive(m, Opts(64, 3)).tokens == b1.tokens);
}

TEST_CASE("masked tokens never appear") {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    const auto m = RandomTable(6, seed);
    for (int beam : {1, 3}) {
      const auto h = BeamSearch(m, Opts(beam, 5));
      for (int t : h.tokens) {
        CHECK(t != 0);
        CHECK(t != 1);
      }
      CHECK(h.tokens.back() == 2);
    }
  }
}

TEST_CASE("length normalization ranks by mean log-probability") {
  // "eos": log 0.4. "a eos": log(0.6 * 0.6), lower sum, higher mean.
  TableModel m(4, [](const std::vector<int>& prefix) {
    if (prefix.empty()) return Logs({0, 0, 0.4, 0.6});
    return Logs({0, 0, 0.6, 0.4});
  });
  auto o = Opts(2, 3);
  CHECK(BeamSearch(m, o).tokens == std::vector<int>{2});
  o.length_norm = true;
  CHECK(BeamSearch(m, o).tokens == std::vector<int>{3, 2});
}

TEST_CASE("invalid decode options are rejected") {
  const auto m = HandTable();
  CHECK_THROWS_AS(BeamSearch(m, Opts(0, 3)), ValidationError);
  CHECK_THROWS_AS(BeamSearch(m, Opts(2, 0)), ValidationError);
  auto o = Opts(2, 3);
  o.masked = {0, 1, 2, 3, 4};
  CHECK_THROWS_AS(BeamSearch(m, o), ValidationError);
}

struct TinyCaptioner {
  Vocabulary vocab;
  AlignNets<float> nets;
};

TinyCaptioner MakeCaptioner(uint64_t seed) {
  TinyCaptioner t;
  std::map<std::string, int64_t> counts = {{"a", 5}, {"boat", 4}, {"on", 3}, {"water", 2}, {"dog", 1}};
  t.vocab = Vocabulary::FromCounts(counts, 1);
  LmConfig lc;
  lc.word_dim = 6;
  lc.hidden = 7;
  lc.embed_dim = 5;
  auto lm = LanguageModel<float>::Create(t.vocab.size(), lc, seed);
  AlignConfig ac;
  ac.translator_hidden = 8;
  ac.critic_hidden = 4;
  t.nets = AlignNets<float>::Create(6, 3, lm.decoder_store(), ac, seed);
  return t;
}

TEST_CASE("decoder step model masks reserved tokens and normalizes") {
  auto t = MakeCaptioner(3);
  std::vector<float> e = {0.1f, -0.2f, 0.3f, 0.0f, 0.5f};
  DecoderStepModel m(t.nets.decoder(), e);
  std::vector<double> lp;
  auto s = m.Start(&lp);
  REQUIRE(static_cast<int>(lp.size()) == t.vocab.size());
  CHECK(lp[Vocabulary::kPad] == kNegInf);
  CHECK(lp[Vocabulary::kBos] == kNegInf);
  CHECK(lp[Vocabulary::kUnk] == kNegInf);
  double total = 0;
  for (double v : lp) total += std::exp(v);
  CHECK(total == doctest::Approx(1).epsilon(1e-9));
  m.Advance(s, 4, &lp);
  total = 0;
  for (double v : lp) total += std::exp(v);
  CHECK(total == doctest::Approx(1).epsilon(1e-9));
  CHECK_THROWS_AS(DecoderStepModel(t.nets.decoder(), std::vector<float>(3)), ShapeError);
}

TEST_CASE("captioner output is deterministic and free of reserved tokens") {
  auto t = MakeCaptioner(5);
  Captioner cap(std::move(t.nets), t.vocab);
  FeatureTable table;
  table.ids = {"x", "y", "z"};
  table.features = nn::Matrix<float>(3, 6);
  Rng rng(9);
  for (auto& v : table.features.values()) v = static_cast<float>(rng.Normal());
  CaptionOptions o;
  o.beam = 3;
  o.max_len = 6;
  const auto a = cap.CaptionAll(table, o);
  const auto b = cap.CaptionAll(table, o);
  REQUIRE(a.size() == 3);
  CHECK(a == b);
  const auto e = cap.Translate(table.features);
  for (int i = 0; i < 3; ++i) {
    CHECK(a[i].first == table.ids[i]);
    const auto h = cap.Decode(e.row(i), o);
    CHECK(static_cast<int>(h.tokens.size()) <= o.max_len + 1);
    for (int tok : h.tokens) {
      CHECK(tok != Vocabulary::kPad);
      CHECK(tok != Vocabulary::kBos);
      CHECK(tok != Vocabulary::kUnk);
    }
    CHECK(cap.vocab().Decode(h.tokens) == a[i].second);
    CHECK(cap.Caption(table.features.row(i), o) == a[i].second);
    DecoderStepModel m(cap.nets().decoder(), e.row(i));
    DecodeOptions d;
    d.beam = 1;
    d.max_len = o.max_len;
    d.masked = {0, 1, 3};
    CaptionOptions g = o;
    g.beam = 1;
    CHECK(GreedyDecode(m, d).tokens == cap.Decode(e.row(i), g).tokens);
  }
  FeatureTable wrong;
  wrong.ids = {"q"};
  wrong.features = nn::Matrix<float>(1, 4);
  CHECK_THROWS_AS(cap.CaptionAll(wrong, o), ValidationError);
}

TEST_CASE("captioner loads from saved checkpoint and vocabulary") {
  testing::TempDir dir("cap");
  auto t = MakeCaptioner(8);
  SaveAlignNets(dir / "align.ckpt", t.nets);
  t.vocab.Save(dir / "vocab.txt");
  Captioner loaded = Captioner::Load(dir / "align.ckpt", dir / "vocab.txt");
  Captioner direct(std::move(t.nets), t.vocab);
  std::vector<float> f = {0.3f, -1, 0.2f, 0.9f, -0.4f, 0.1f};
  CHECK(loaded.Caption(f, {}) == direct.Caption(f, {}));
}

}  // namespace
}  // namespace unicap
