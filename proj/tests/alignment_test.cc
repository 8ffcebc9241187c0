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

#include <boost/math/distributions/chi_squared.hpp>
#include <map>
#include <numeric>
#include <sstream>

#include "alignment/align_trainer.h"
#include "alignment/assignment_graph.h"
#include "alignment/image_data.h"
#include "alignment/networks.h"
#include "common/error.h"
#include "doctest.h"
#include "test_util.h"

namespace unicap {
namespace {

using nn::Matrix;

TEST_CASE("graph from the small example") {
  const std::vector<ConceptSet> images = {{"dog", "ball"}};
  const std::vector<ConceptSet> sentences = {{"dog", "ball"}, {"dog"}, {"car"}};
  const auto g = AssignmentGraph::Build(images, sentences);
  REQUIRE(g.Edges(0).size() == 2);
  CHECK(g.Edges(0)[0] == AssignmentGraph::Edge{0, 2});
  CHECK(g.Edges(0)[1] == AssignmentGraph::Edge{1, 1});
  CHECK(g.Probability(0, 0) == doctest::Approx(2.0 / 3));
  CHECK(g.Probability(0, 1) == doctest::Approx(1.0 / 3));
  CHECK(g.Probability(0, 2) == 0.0);
}

TEST_CASE("disjoint concepts give an empty graph") {
  const std::vector<ConceptSet> images = {{"a"}, {"b"}};
  const std::vector<ConceptSet> sentences = {{"c"}, {"d"}};
  const auto g = AssignmentGraph::Build(images, sentences);
  CHECK(g.edge_count() == 0);
  CHECK(g.dropped() == std::vector<int>{0, 1});
  CHECK(g.ActiveImages().empty());
}

std::vector<ConceptSet> RandomSets(int n, int n_concepts, int max_size, Rng& rng) {
  std::vector<ConceptSet> out;
  for (int i = 0; i < n; ++i) {
    ConceptSet s;
    const int k = static_cast<int>(rng.UniformIndex(max_size + 1));
    for (int t = 0; t < k; ++t) s.Insert("c" + std::to_string(rng.UniformIndex(n_concepts)));
    out.push_back(s);
  }
  return out;
}

TEST_CASE("graph matches brute-force intersection and is order independent") {
  Rng rng(17);
  const auto images = RandomSets(50, 12, 4, rng);
  const auto sentences = RandomSets(200, 12, 4, rng);
  const auto g = AssignmentGraph::Build(images, sentences);
  for (int i = 0; i < 50; ++i) {
    std::vector<AssignmentGraph::Edge> expected;
    uint64_t sum = 0;
    for (int j = 0; j < 200; ++j) {
      const auto o = static_cast<uint32_t>(images[i].IntersectionSize(sentences[j]));
      if (o > 0) {
        expected.push_back({static_cast<uint32_t>(j), o});
        sum += o;
      }
    }
    CHECK(std::vector<AssignmentGraph::Edge>(g.Edges(i).begin(), g.Edges(i).end()) == expected);
    CHECK(g.RowSum(i) == sum);
    // Probabilities are e_ij / sum exactly: numerators add up to the row sum.
    uint64_t numerators = 0;
    for (const auto& e : g.Edges(i)) numerators += e.weight;
    CHECK(numerators == g.RowSum(i));
    if (sum > 0) {
      double total = 0;
      for (const auto& e : g.Edges(i)) total += g.Probability(i, static_cast<int>(e.sentence));
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // Reversing the image order reverses the rows and nothing else.
  std::vector<ConceptSet> reversed(images.rbegin(), images.rend());
  const auto r = AssignmentGraph::Build(reversed, sentences);
  for (int i = 0; i < 50; ++i) {
    CHECK(std::vector<AssignmentGraph::Edge>(r.Edges(49 - i).begin(), r.Edges(49 - i).end()) ==
          std::vector<AssignmentGraph::Edge>(g.Edges(i).begin(), g.Edges(i).end()));
  }
}

TEST_CASE("graph save and load") {
  Rng rng(3);
  const auto g = AssignmentGraph::Build(RandomSets(20, 6, 3, rng), RandomSets(30, 6, 3, rng));
  testing::TempDir dir("graph");
  g.Save(dir / "g.tsv");
  const auto loaded = AssignmentGraph::Load(dir / "g.tsv");
  CHECK(loaded == g);
  CHECK(loaded.dropped() == g.dropped());
  testing::WriteFile(dir / "bad.tsv", "AGRAPH1\t2\t2\n0\t1:0\n");
  CHECK_THROWS_AS(AssignmentGraph::Load(dir / "bad.tsv"), ValidationError);
  testing::WriteFile(dir / "bad2.tsv", "GRAPH\t2\t2\n");
  CHECK_THROWS_AS(AssignmentGraph::Load(dir / "bad2.tsv"), ValidationError);
}

TEST_CASE("assignment sampling") {
  const std::vector<ConceptSet> images = {{"dog", "ball"}, {"car"}};
  const std::vector<ConceptSet> sentences = {{"dog", "ball"}, {"dog"}, {"car"}};
  const auto g = AssignmentGraph::Build(images, sentences);
  Rng rng(5);
  CHECK(g.SampleK(1, 10, rng) == std::vector<int>(10, 2));

  const int draws = 100000;
  std::vector<int64_t> counts(2, 0);
  for (int i = 0; i < draws; ++i) ++counts[g.Sample(0, rng)];
  CHECK(std::abs(counts[0] / double(draws) - 2.0 / 3) < 0.02);
  double stat = 0;
  const double expected[2] = {draws * 2.0 / 3, draws / 3.0};
  for (int k = 0; k < 2; ++k) stat += (counts[k] - expected[k]) * (counts[k] - expected[k]) / expected[k];
  CHECK(boost::math::cdf(boost::math::complement(boost::math::chi_squared(1.0), stat)) > 0.01);

  Rng a(77), b(77);
  CHECK(g.SampleK(0, 25, a) == g.SampleK(0, 25, b));
}

TEST_CASE("graph from pairs") {
  const std::vector<std::pair<int, int>> pairs = {{0, 2}, {1, 0}, {1, 1}, {1, 1}};
  const auto g = AssignmentGraph::FromPairs(3, 3, pairs);
  CHECK(g.Edges(1).size() == 2);
  CHECK(g.Probability(1, 0) == 0.5);
  CHECK(g.dropped() == std::vector<int>{2});
  const std::vector<std::pair<int, int>> bad = {{0, 5}};
  CHECK_THROWS_AS(AssignmentGraph::FromPairs(3, 3, bad), ValidationError);
}

TEST_CASE("translator basics") {
  nn::ParameterStore<double> store;
  Rng rng(1);
  auto t = Translator<double>::Create(store, 6, 5, 4, rng);
  Matrix<double> x(2, 6);
  for (auto& v : x.values()) v = rng.Normal();
  const auto y1 = t.Forward(x, nullptr);
  const auto y2 = t.Forward(x, nullptr);
  CHECK(y1.values() == y2.values());
  for (auto& b : store.blocks()) std::fill(b.value.begin(), b.value.end(), 0.0);
  const auto zero = t.Forward(x, nullptr);
  for (double v : zero.values()) CHECK(v == 0.0);
  Matrix<double> wrong(2, 7);
  CHECK_THROWS_AS(t.Forward(wrong, nullptr), ShapeError);
}

std::vector<std::span<const double>> Spans(const std::vector<std::vector<double>>& rows) {
  std::vector<std::span<const double>> out;
  for (const auto& r : rows) out.emplace_back(r);
  return out;
}

TEST_CASE("robust loss picks the nearest candidate") {
  const std::vector<double> t = {0.0, 0.0};
  std::vector<std::vector<double>> c = {{1, 1}, {2, 0}, {0.5, 0.5}, {0, 0}};
  auto r = RobustLoss<double>(t, Spans(c));
  CHECK(r.loss == 0.0);
  CHECK(r.index == 3);

  const std::vector<double> one = {0.0};
  std::vector<std::vector<double>> d = {{std::sqrt(0.4)}, {std::sqrt(0.1)}, {std::sqrt(0.9)}};
  r = RobustLoss<double>(one, Spans(d));
  CHECK(r.loss == doctest::Approx(0.1));
  CHECK(r.index == 1);

  std::vector<std::vector<double>> tie = {{3.0}, {1.0}, {-1.0}};
  r = RobustLoss<double>(one, Spans(tie));
  CHECK(r.index == 1);
  CHECK(r.loss == 1.0);

  std::vector<double> grad(1, 0.0);
  RobustLoss<double>(one, Spans(tie), 1.0, grad);
  CHECK(grad[0] == -2.0);  // only the selected candidate contributes
}

TEST_CASE("robust loss properties on random candidates") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> t(5);
    for (auto& v : t) v = rng.Normal();
    std::vector<std::vector<double>> c(6, std::vector<double>(5));
    for (auto& row : c)
      for (auto& v : row) v = rng.Normal();
    const auto r = RobustLoss<double>(t, Spans(c));
    const double mean = MeanL2Loss<double>(t, Spans(c));
    CHECK(r.loss <= mean + 1e-12);
    auto shuffled = c;
    rng.Shuffle(shuffled);
    CHECK(RobustLoss<double>(t, Spans(shuffled)).loss == r.loss);
  }
  // Equidistant candidates: min equals mean.
  const std::vector<double> origin = {0, 0};
  std::vector<std::vector<double>> ring = {{1, 0}, {0, 1}, {-1, 0}};
  CHECK(RobustLoss<double>(origin, Spans(ring)).loss == MeanL2Loss<double>(origin, Spans(ring)));
}

TEST_CASE("critic basics") {
  nn::ParameterStore<double> store;
  Rng rng(2);
  auto critic = Critic<double>::Create(store, 3, 4, 6, rng);
  Matrix<double> e(1, 3), c(1, 4);
  for (auto& v : e.values()) v = rng.Normal();
  c(0, 1) = 1;
  const double s1 = critic.Forward(e, c, nullptr)[0];
  c(0, 2) = 1;
  const double s2 = critic.Forward(e, c, nullptr)[0];
  CHECK(s1 != s2);
  for (auto& b : store.blocks()) std::fill(b.value.begin(), b.value.end(), 0.0);
  CHECK(critic.Forward(e, c, nullptr)[0] == 0.0);
}

TEST_CASE("gradient penalty of a linear critic") {
  nn::ParameterStore<double> store;
  Rng rng(4);
  auto critic = Critic<double>::Create(store, 3, 2, 4, rng);
  // Large positive biases keep every hidden unit active, so D is linear in
  // the embedding with weight w = W1e * w2.
  auto& b1 = store.Get("critic.l1.b");
  std::fill(b1.value.begin(), b1.value.end(), 100.0);
  const auto& w1 = store.Get("critic.l1.w").value;
  const auto& w2 = store.Get("critic.l2.w").value;
  double norm2 = 0;
  for (int k = 0; k < 3; ++k) {
    double w = 0;
    for (int h = 0; h < 4; ++h) w += w1[k * 4 + h] * w2[h];
    norm2 += w * w;
  }
  const double expected = 10.0 * (std::sqrt(norm2) - 1) * (std::sqrt(norm2) - 1);
  Matrix<double> e(5, 3), c(5, 2);
  for (auto& v : e.values()) v = rng.Uniform(-1, 1);
  const auto gp = critic.GradientPenalty(e, c, 10.0, 1.0, false);
  CHECK(gp.penalty == doctest::Approx(expected).epsilon(1e-12));
  CHECK(gp.penalty >= 0.0);

  // Rescale the output layer so |w| = 1 exactly: the penalty vanishes.
  auto& w2m = store.Get("critic.l2.w").value;
  for (auto& v : w2m) v /= std::sqrt(norm2);
  CHECK(critic.GradientPenalty(e, c, 10.0, 1.0, false).penalty == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("ablation switches") {
  AlignConfig cfg;
  cfg.ablation = Ablation::kJointL2;
  auto w = ResolveWeights(cfg);
  CHECK_FALSE(w.robust);
  CHECK(w.lambda_ce == 1.0);
  CHECK(w.lambda_align == 1.0);
  CHECK(w.lambda_adv == 0.0);
  cfg.ablation = Ablation::kJointRobust;
  w = ResolveWeights(cfg);
  CHECK(w.robust);
  CHECK(w.lambda_adv == 0.0);
  cfg.ablation = Ablation::kAlignOnly;
  w = ResolveWeights(cfg);
  CHECK_FALSE(w.train_decoder);
  CHECK(w.lambda_ce == 0.0);
  cfg.ablation = Ablation::kMle;
  w = ResolveWeights(cfg);
  CHECK(w.lambda_align == 0.0);
  CHECK(w.lambda_ce == 1.0);
  cfg.ablation = Ablation::kJointAdv;
  w = ResolveWeights(cfg);
  CHECK(w.lambda_adv == doctest::Approx(0.1));
  CHECK(ParseAblation("joint-robust") == Ablation::kJointRobust);
  CHECK(AblationName(ParseAblation("align-only")) == "align-only");
  CHECK_THROWS_AS(ParseAblation("nope"), ValidationError);
  CHECK_THROWS_AS(ParsePolarity("nope"), ValidationError);
}

TEST_CASE("feature and detection files") {
  testing::TempDir dir("img");
  FeatureTable t;
  t.ids = {"img1", "img2"};
  t.features = Matrix<float>(2, 3);
  for (size_t i = 0; i < 6; ++i) t.features.values()[i] = 0.5f * i - 1;
  WriteFeatures(dir / "f.imgf", dir / "f.ids", t);
  const auto r = ReadFeatures(dir / "f.imgf", dir / "f.ids");
  CHECK(r.ids == t.ids);
  CHECK(r.features.values() == t.features.values());
  CHECK(testing::ReadFile(dir / "f.imgf").substr(0, 5) == "IMGF1");
  testing::WriteFile(dir / "short.ids", "img1\n");
  CHECK_THROWS_AS(ReadFeatures(dir / "f.imgf", dir / "short.ids"), ValidationError);
  const auto bytes = testing::ReadFile(dir / "f.imgf");
  testing::WriteFile(dir / "trunc.imgf", bytes.substr(0, bytes.size() - 2));
  CHECK_THROWS_AS(ReadFeatures(dir / "trunc.imgf", dir / "f.ids"), ValidationError);

  std::istringstream lex_in("dog\tdog.n.01\nfire_hydrant\thydrant.n.01\n!hypo\tdog.n.01\tanimal.n.01\n");
  const auto lex = ConceptLexicon::Parse(lex_in, "lex");
  testing::WriteFile(dir / "det.tsv", "img1\tanimal.n.01,Fire Hydrant\nimg2\tunknownthing\n");
  const auto set = LoadImages(dir / "f.imgf", dir / "f.ids", dir / "det.tsv", lex);
  CHECK(set.concepts[0] == ConceptSet{"animal.n.01", "dog.n.01", "hydrant.n.01"});
  CHECK(set.concepts[1].empty());
  const auto v = ConceptVector(set.concepts[0], lex);
  CHECK(v == std::vector<float>{1, 1, 1});
}

}  // namespace
}  // namespace unicap
