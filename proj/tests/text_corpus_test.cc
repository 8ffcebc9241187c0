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

#include <map>
#include <set>
#include <sstream>

#include "common/error.h"
#include "common/rng.h"
#include "concept_lexicon/concept_lexicon.h"
#include "doctest.h"
#include "test_util.h"
#include "text_corpus/corpus.h"
#include "text_corpus/pair_index.h"
#include "text_corpus/tokenizer.h"
#include "text_corpus/vocabulary.h"

namespace unicap {
namespace {

using testing::ChiSquarePValue;

ConceptLexicon DogLexicon() {
  std::istringstream in("dog\tdog.n.01\npuppy\tdog.n.01\nball\tball.n.01\ncar\tcar.n.01\n");
  return ConceptLexicon::Parse(in, "lex");
}

TEST_CASE("tokenizer") {
  CHECK(Tokenize("A Dog, running!") == std::vector<std::string>{"a", "dog", "running"});
  CHECK(Tokenize("the dog's ball 'quoted'") == std::vector<std::string>{"the", "dog's", "ball", "quoted"});
  CHECK(Tokenize("  \t ").empty());
  CHECK(Tokenize("x-ray") == std::vector<std::string>{"x", "ray"});
}

TEST_CASE("vocabulary ordering and reserved ids") {
  const auto v = Vocabulary::FromCounts({{"b", 3}, {"a", 3}, {"c", 5}, {"rare", 1}}, 2);
  CHECK(v.size() == 7);
  CHECK(v.Token(0) == "<pad>");
  CHECK(v.Token(3) == "<unk>");
  CHECK(v.Id("c") == 4);
  CHECK(v.Id("a") == 5);
  CHECK(v.Id("b") == 6);
  CHECK(v.Id("rare") == Vocabulary::kUnk);
  CHECK(v.Decode({1, 4, 3, 5, 2, 0}) == "c <unk> a");

  testing::TempDir dir("vocab");
  v.Save(dir / "v.txt");
  const auto w = Vocabulary::Load(dir / "v.txt");
  CHECK(w.tokens() == v.tokens());
}

TEST_CASE("build corpus basics") {
  const auto lex = DogLexicon();
  const std::vector<std::string> lines = {"a dog runs", "a dog runs"};
  const auto c = BuildCorpusFromLines(lines, lex, {.min_count = 1, .max_len = 20});
  CHECK(c.vocab.size() == 7);
  REQUIRE(c.records.size() == 2);
  CHECK(c.records[0].concepts == ConceptSet{"dog.n.01"});
  CHECK(c.records[0].tokens.front() == Vocabulary::kBos);
  CHECK(c.records[0].tokens.back() == Vocabulary::kEos);
  CHECK(c.records[0].length() == 3);
}

TEST_CASE("rare token becomes unk but keeps its concept") {
  const auto lex = DogLexicon();
  const std::vector<std::string> lines = {"puppy sleeps", "a dog runs", "a dog runs", "sleeps"};
  const auto c = BuildCorpusFromLines(lines, lex, {.min_count = 2, .max_len = 20});
  CHECK(c.records[0].tokens[1] == Vocabulary::kUnk);
  CHECK(c.records[0].concepts == ConceptSet{"dog.n.01"});
  CHECK(c.records[0].primary_concept == "dog.n.01");
}

TEST_CASE("truncation, blank lines and errors") {
  const auto lex = DogLexicon();
  const std::vector<std::string> lines = {"one two three four five six dog", "", "  ,, ", "dog"};
  const auto c = BuildCorpusFromLines(lines, lex, {.min_count = 1, .max_len = 4});
  REQUIRE(c.records.size() == 2);
  CHECK(c.records[0].length() == 4);
  CHECK(c.records[0].tokens.back() == Vocabulary::kEos);
  CHECK(c.records[0].concepts.empty());  // "dog" was cut off
  CHECK(c.records[1].line == 3);
  CHECK_THROWS_AS(BuildCorpusFromLines(lines, lex, {.min_count = 1, .max_len = 3}), ValidationError);
  const std::vector<std::string> blank = {"", "   "};
  CHECK_THROWS_AS(BuildCorpusFromLines(blank, lex, {}), ValidationError);
  CHECK_THROWS_AS(BuildCorpus("/nonexistent/corpus.txt", lex, {}), IoError);
}

TEST_CASE("pair index small cases") {
  const std::vector<ConceptSet> w = {{"dog", "ball"}, {"dog", "ball"}, {"car"}};
  const auto idx = PairIndex::Build(w);
  REQUIRE(idx.Positives(0).size() == 1);
  CHECK(idx.Positives(0)[0].sentence == 1);
  CHECK(idx.Positives(0)[0].overlap == 2);
  CHECK(idx.Negatives(0) == std::vector<int>{2});

  const std::vector<ConceptSet> w2 = {{"dog", "ball"}, {"dog"}};
  const auto idx2 = PairIndex::Build(w2);
  CHECK(idx2.Positives(0).empty());
  CHECK(idx2.Negatives(0).empty());
  CHECK_FALSE(idx2.TripletEligible(0));
}

std::vector<ConceptSet> RandomConceptSets(int n, int n_concepts, int max_size, Rng& rng) {
  std::vector<ConceptSet> out;
  for (int i = 0; i < n; ++i) {
    ConceptSet s;
    const int k = static_cast<int>(rng.UniformIndex(max_size + 1));
    for (int t = 0; t < k; ++t) s.Insert("c" + std::to_string(rng.UniformIndex(n_concepts)));
    out.push_back(s);
  }
  return out;
}

TEST_CASE("pair index matches brute-force intersection") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = trial == 0 ? 4 : 60;
    const auto w = RandomConceptSets(n, 8, 4, rng);
    const auto idx = PairIndex::Build(w);
    for (int j = 0; j < n; ++j) {
      std::vector<PairIndex::Positive> pos;
      std::vector<int> neg;
      uint32_t weight = 0;
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        const auto o = static_cast<uint32_t>(w[j].IntersectionSize(w[k]));
        if (o >= 2) {
          pos.push_back({static_cast<uint32_t>(k), o});
          weight += o;
        }
        if (o == 0) neg.push_back(k);
      }
      CHECK(std::vector<PairIndex::Positive>(idx.Positives(j).begin(), idx.Positives(j).end()) == pos);
      CHECK(idx.Negatives(j) == neg);
      CHECK(idx.NegativeCount(j) == neg.size());
      CHECK(idx.PositiveWeight(j) == weight);
      for (int k = 0; k < n; ++k) {
        CHECK(idx.Overlap(j, k) == idx.Overlap(k, j));
        CHECK(idx.IsNegative(j, k) == idx.IsNegative(k, j));
      }
    }
  }
}

TEST_CASE("pair index save and load") {
  Rng rng(5);
  const auto w = RandomConceptSets(40, 6, 3, rng);
  const auto idx = PairIndex::Build(w);
  testing::TempDir dir("pidx");
  idx.Save(dir / "p.bin");
  CHECK(testing::ReadFile(dir / "p.bin").substr(0, 5) == "PIDX1");
  const auto loaded = PairIndex::Load(dir / "p.bin");
  CHECK(loaded == idx);
  testing::WriteFile(dir / "bad.bin", "PIDX0garbage");
  CHECK_THROWS(PairIndex::Load(dir / "bad.bin"));
}

TEST_CASE("triplet positive sampling follows overlap weights") {
  // Anchor {a,b,c,d}; s1 shares 2, s2 shares 4, s3 shares none.
  const std::vector<ConceptSet> w = {{"a", "b", "c", "d"}, {"a", "b"}, {"a", "b", "c", "d"}, {"z"}, {"y"}};
  const auto idx = PairIndex::Build(w);
  Rng rng(11);
  const int draws = 100000;
  std::map<int, int64_t> pos_count, neg_count;
  for (int i = 0; i < draws; ++i) {
    const auto t = SampleTriplet(0, idx, rng);
    REQUIRE(t.has_value());
    ++pos_count[t->positive];
    ++neg_count[t->negative];
  }
  CHECK(std::abs(pos_count[1] / double(draws) - 1.0 / 3) < 0.02);
  CHECK(std::abs(pos_count[2] / double(draws) - 2.0 / 3) < 0.02);
  CHECK(ChiSquarePValue({pos_count[1], pos_count[2]}, {1.0 / 3, 2.0 / 3}) > 0.01);
  CHECK(ChiSquarePValue({neg_count[3], neg_count[4]}, {0.5, 0.5}) > 0.01);
}

TEST_CASE("triplet sampling edge cases and determinism") {
  const std::vector<ConceptSet> w = {{"a", "b"}, {"a", "b"}, {"c"}, {"a"}};
  const auto idx = PairIndex::Build(w);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto t = SampleTriplet(0, idx, rng);
    REQUIRE(t.has_value());
    CHECK(t->positive == 1);
    CHECK(t->negative == 2);
  }
  CHECK_FALSE(SampleTriplet(2, idx, rng).has_value());
  CHECK_FALSE(SampleTriplet(3, idx, rng).has_value());

  Rng r1(99), r2(99);
  Rng gen(4);
  const auto big = RandomConceptSets(80, 6, 4, gen);
  const auto bidx = PairIndex::Build(big);
  for (int j = 0; j < 80; ++j) {
    const auto a = SampleTriplet(j, bidx, r1);
    const auto b = SampleTriplet(j, bidx, r2);
    REQUIRE(a.has_value() == b.has_value());
    if (!a) continue;
    CHECK(a->positive == b->positive);
    CHECK(a->negative == b->negative);
    CHECK(bidx.Overlap(j, a->positive) >= 2);
    CHECK(bidx.Overlap(j, a->negative) == 0);
    CHECK(a->positive != j);
  }
}

}  // namespace
}  // namespace unicap
