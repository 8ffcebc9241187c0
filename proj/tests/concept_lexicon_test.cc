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
#include <random>
#include <sstream>

#include "common/error.h"
#include "concept_lexicon/concept_lexicon.h"
#include "doctest.h"
#include "test_util.h"

namespace unicap {
namespace {

ConceptLexicon ParseText(const std::string& text, LexiconOptions options = {}) {
  std::istringstream in(text);
  return ConceptLexicon::Parse(in, "lex.tsv", options);
}

std::vector<std::string> Words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

const char kDogLexicon[] =
    "# small lexicon\n"
    "dog\tdog.n.01\n"
    "puppy\tdog.n.01\n"
    "!hypo\tdog.n.01\tanimal.n.01\n";

TEST_CASE("load lexicon with surfaces and a hyponym") {
  const auto lex = ParseText(kDogLexicon);
  CHECK(lex.surface_count() == 2);
  CHECK(lex.concept_count() == 2);
  CHECK(lex.Lookup("puppy") == std::optional<std::string>("dog.n.01"));
  CHECK(lex.HasConcept("animal.n.01"));
}

TEST_CASE("load lexicon from file and missing file") {
  testing::TempDir dir("lex");
  testing::WriteFile(dir / "l.tsv", kDogLexicon);
  CHECK(ConceptLexicon::Load(dir / "l.tsv").surface_count() == 2);
  CHECK_THROWS_AS(ConceptLexicon::Load(dir / "missing.tsv"), IoError);
}

TEST_CASE("empty lexicon is valid") {
  const auto lex = ParseText("");
  CHECK(lex.surface_count() == 0);
  CHECK(lex.concept_count() == 0);
}

TEST_CASE("two-cycle is rejected and names a concept") {
  try {
    ParseText("!hypo\ta.n.01\tb.n.01\n!hypo\tb.n.01\ta.n.01\n");
    FAIL("expected a cycle error");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("cycle") != std::string::npos);
    CHECK((what.find("a.n.01") != std::string::npos || what.find("b.n.01") != std::string::npos));
  }
}

TEST_CASE("self loop and longer cycles are rejected") {
  CHECK_THROWS_AS(ParseText("!hypo\ta.n.01\ta.n.01\n"), ValidationError);
  CHECK_THROWS_AS(ParseText("!hypo\ta\tb\n!hypo\tb\tc\n!hypo\tc\ta\n"), ValidationError);
  // A diamond is not a cycle.
  CHECK_NOTHROW(ParseText("!hypo\ta\tb\n!hypo\ta\tc\n!hypo\tb\td\n!hypo\tc\td\n"));
}

TEST_CASE("parse errors carry the line number") {
  try {
    ParseText("dog\tdog.n.01\n\nbroken line without tab\n");
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("lex.tsv:3:") == 0);
  }
  CHECK_THROWS_AS(ParseText("dog\tdog.n.01\ndog\tcat.n.01\n"), ValidationError);
  CHECK_THROWS_AS(ParseText("a_b_c\tx.n.01\n"), ValidationError);
  CHECK_THROWS_AS(ParseText("!hypo\tonly\n"), ValidationError);
}

TEST_CASE("extract concepts") {
  const auto lex = ParseText(kDogLexicon);
  CHECK(lex.Extract(Words("a puppy runs")) == ConceptSet{"dog.n.01"});
  CHECK(lex.Extract(Words("a puppy and a dog")) == ConceptSet{"dog.n.01"});
  CHECK(lex.Extract(Words("nothing here")).empty());
}

TEST_CASE("bigram surface wins over its first word") {
  const auto lex = ParseText("fire_hydrant\thydrant.n.01\nfire\tfire.n.01\nhydrant\thydrant.n.01\n");
  // Segmentations of [fire, hydrant]: {fire}{hydrant} -> {fire, hydrant};
  // {fire hydrant} -> {hydrant}. Longest match picks the second.
  CHECK(lex.Extract(Words("fire hydrant")) == ConceptSet{"hydrant.n.01"});
  CHECK(lex.Extract(Words("fire")) == ConceptSet{"fire.n.01"});
  // Each token is consumed once: "fire" after the bigram starts fresh.
  CHECK(lex.ExtractSequence(Words("fire hydrant fire")) ==
        std::vector<std::string>{"hydrant.n.01", "fire.n.01"});
}

TEST_CASE("plural strip is optional") {
  CHECK(ParseText(kDogLexicon).Extract(Words("dogs")).empty());
  CHECK(ParseText(kDogLexicon, {.strip_plural = true}).Extract(Words("dogs")) == ConceptSet{"dog.n.01"});
}

TEST_CASE("hyponym expansion") {
  const auto lex = ParseText(kDogLexicon);
  CHECK(lex.ExpandHyponyms({"animal.n.01"}) == ConceptSet{"animal.n.01", "dog.n.01"});
  CHECK(lex.ExpandHyponyms({}).empty());
  const auto chain = ParseText("!hypo\tc3\tc2\n!hypo\tc2\tc1\n");
  CHECK(chain.ExpandHyponyms({"c1"}) == ConceptSet{"c1", "c2", "c3"});
  CHECK(chain.ExpandHyponyms({"c3"}) == ConceptSet{"c3"});
  // Unknown concepts are kept as they are.
  CHECK(chain.ExpandHyponyms({"zz"}) == ConceptSet{"zz"});
}

TEST_CASE("properties over random lexicons") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    ConceptLexicon lex;
    const int n = 12;
    for (int i = 0; i < n; ++i) lex.AddSurface("w" + std::to_string(i), "c" + std::to_string(i % 6));
    // Edges only from lower to higher index keep the graph acyclic.
    for (int e = 0; e < 8; ++e) {
      int a = gen() % 6, b = gen() % 6;
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      lex.AddHyponym("c" + std::to_string(b), "c" + std::to_string(a));
    }
    lex.Validate();

    std::vector<std::string> tokens;
    for (int i = 0; i < 6; ++i) tokens.push_back("w" + std::to_string(gen() % (n + 3)));
    auto doubled = tokens;
    doubled.insert(doubled.end(), tokens.begin(), tokens.end());
    CHECK(lex.Extract(doubled) == lex.Extract(tokens));
    auto shuffled = tokens;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    CHECK(lex.Extract(shuffled) == lex.Extract(tokens));

    const ConceptSet s = lex.Extract(tokens);
    const ConceptSet e = lex.ExpandHyponyms(s);
    CHECK(s.IsSubsetOf(e));
    CHECK(lex.ExpandHyponyms(e) == e);
    ConceptSet bigger = s;
    bigger.Insert("c" + std::to_string(gen() % 6));
    CHECK(e.IsSubsetOf(lex.ExpandHyponyms(bigger)));
  }
}

TEST_CASE("canonical write round-trips") {
  const auto lex = ParseText(kDogLexicon);
  std::ostringstream out;
  lex.Write(out);
  const auto again = ParseText(out.str());
  std::ostringstream out2;
  again.Write(out2);
  CHECK(out.str() == out2.str());
  CHECK(again.entries() == lex.entries());
}

}  // namespace
}  // namespace unicap
