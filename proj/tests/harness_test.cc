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
#include <filesystem>
#include <set>
#include <string>

#include "common/error.h"
#include "concept_lexicon/concept_lexicon.h"
#include "doctest.h"
#include "harness/pipeline.h"
#include "harness/run_config.h"
#include "harness/synthetic_world.h"
#include "test_util.h"

namespace unicap {
namespace {

namespace fs = std::filesystem;
using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

TEST_CASE("run config defaults are frozen") {
  const RunConfig c;
  const std::pair<const char*, const char*> expected[] = {
      {"lm.hidden", "200"},         {"lm.embed_dim", "256"},   {"lm.lambda_t", "0.1"},
      {"lm.batch", "64"},           {"align.K", "10"},         {"align.lambda_ce", "1"},
      {"align.lambda_r", "1"},      {"align.lambda_adv", "0.1"}, {"align.gp_coeff", "10"},
      {"align.batch", "64"},        {"decode.beam", "3"},      {"eval.oracle_runs", "100"},
      {"eval.mixing_k", "10"},      {"align.ablation", "joint-adv"},
  };
  for (const auto& [key, value] : expected) {
    CAPTURE(key);
    CHECK(c.Get(key) == value);
  }
  CHECK_NOTHROW(c.Validate());
}

TEST_CASE("run config parse reports file and line") {
  try {
    RunConfig::Parse("seed = 3\n# note\nlm.hiden = 4\n", "x.cfg");
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("x.cfg:3") != std::string::npos);
  }
  CHECK_THROWS_AS(RunConfig::Parse("seed = 3\nseed = 4\n", "x.cfg"), ValidationError);
  CHECK_THROWS_AS(RunConfig::Parse("lm.batch = many\n", "x.cfg"), ValidationError);
  CHECK_THROWS_AS(RunConfig::Parse("decode.beam\n", "x.cfg"), ValidationError);
  CHECK_THROWS_AS(RunConfig::Parse("decode.beam = 0\n", "x.cfg"), ValidationError);
}

TEST_CASE("run config echo parses back to itself") {
  auto c = RunConfig::Parse("seed = 9\nlm.lr_enc = 0.0003\nalign.ablation = joint-robust\n", "a.cfg");
  CHECK(c.seed == 9);
  CHECK(c.lm.seed == 9);
  CHECK(c.align.seed == 9);
  const auto again = RunConfig::Parse(c.Echo(), "echo");
  CHECK(again.Echo() == c.Echo());
}

TEST_CASE("relative paths resolve against the config directory") {
  TempDir dir("cfg");
  fs::create_directories(dir / "sub");
  WriteFile(dir / "sub" / "run.cfg", "paths.corpus = corpus.txt\npaths.lexicon = /abs/lex.tsv\n");
  const auto c = RunConfig::Load(dir / "sub" / "run.cfg");
  CHECK(fs::path(c.paths.corpus) == dir / "sub" / "corpus.txt");
  CHECK(c.paths.lexicon == "/abs/lex.tsv");
  CHECK(c.paths.references.empty());
  CHECK_THROWS_AS(RunConfig::Load(dir / "missing.cfg"), IoError);
}

SynthOptions Small(WorldKind kind) {
  SynthOptions o;
  o.kind = kind;
  o.seed = 5;
  o.n_images = 40;
  o.n_sentences = 120;
  o.feature_dim = 16;
  return o;
}

TEST_CASE("synthetic world files are byte-identical for a seed") {
  TempDir dir("synth");
  const auto o = Small(WorldKind::kProbe);
  WriteWorld(GenerateWorld(o), dir / "a");
  WriteWorld(GenerateWorld(o), dir / "b");
  for (const char* f : {WorldFiles::kCorpus, WorldFiles::kLexicon, WorldFiles::kFeatures, WorldFiles::kIds,
                        WorldFiles::kDetections, WorldFiles::kReferences, WorldFiles::kWorld, WorldFiles::kConfig}) {
    CAPTURE(f);
    CHECK(!ReadFile(dir / "a" / f).empty());
    CHECK(ReadFile(dir / "a" / f) == ReadFile(dir / "b" / f));
  }
  auto other = o;
  other.seed = 6;
  WriteWorld(GenerateWorld(other), dir / "c");
  CHECK(ReadFile(dir / "a" / WorldFiles::kCorpus) != ReadFile(dir / "c" / WorldFiles::kCorpus));
  // The written lexicon loads and covers every concept.
  const auto lex = ConceptLexicon::Load(dir / "a" / WorldFiles::kLexicon);
  CHECK(lex.concept_count() == static_cast<size_t>(o.n_concepts));
}

TEST_CASE("appearance noise only touches features") {
  auto o = Small(WorldKind::kProbe);
  const auto plain = GenerateWorld(o);
  o.appearance_noise = 0.5;
  const auto noisy = GenerateWorld(o);
  CHECK(noisy.sentences == plain.sentences);
  CHECK(noisy.image_scenes == plain.image_scenes);
  CHECK(noisy.detections == plain.detections);
  CHECK(noisy.features.values() != plain.features.values());
  o.appearance_noise = -1;
  CHECK_THROWS_AS(GenerateWorld(o), ValidationError);
}

bool Contains(const Scene& s, int c) { return std::find(s.begin(), s.end(), c) != s.end(); }

TEST_CASE("probe world: B rides with A and is never detected") {
  const auto w = GenerateWorld(Small(WorldKind::kProbe));
  const auto& b_word = w.words[w.probe_b];
  CHECK_FALSE(w.detectable[w.probe_b]);
  CHECK(w.detectable[w.probe_a]);
  int with_a = 0;
  for (size_t i = 0; i < w.image_scenes.size(); ++i) {
    if (Contains(w.image_scenes[i], w.probe_a)) {
      ++with_a;
      CHECK(Contains(w.image_scenes[i], w.probe_b));
    }
    for (const auto& label : w.detections[i]) CHECK(label != b_word);
  }
  CHECK(with_a > 0);
  for (const auto& s : w.sentence_scenes) {
    if (Contains(s, w.probe_a)) CHECK(Contains(s, w.probe_b));
  }
}

TEST_CASE("control world never pairs A with B") {
  const auto w = GenerateWorld(Small(WorldKind::kControl));
  for (const auto* scenes : {&w.image_scenes, &w.sentence_scenes}) {
    for (const auto& s : *scenes) CHECK_FALSE((Contains(s, w.probe_a) && Contains(s, w.probe_b)));
  }
}

TEST_CASE("identity world has one concept per scene") {
  const auto w = GenerateWorld(Small(WorldKind::kIdentity));
  for (const auto& s : w.sentence_scenes) CHECK(s.size() == 1);
  for (const auto& s : w.image_scenes) CHECK(s.size() == 1);
  for (size_t a = 0; a < w.cooccurrence.size(); ++a) {
    for (size_t b = 0; b < w.cooccurrence.size(); ++b) {
      if (a != b) CHECK(w.cooccurrence[a][b] == 0);
    }
  }
}

TEST_CASE("clusters world needs an even concept count") {
  auto o = Small(WorldKind::kClusters);
  o.n_concepts = 9;
  CHECK_THROWS_AS(GenerateWorld(o), ValidationError);
  o.n_concepts = 10;
  const auto w = GenerateWorld(o);
  for (const auto& s : w.sentence_scenes) {
    REQUIRE(s.size() == 2);
    CHECK(s[0] % 2 == 0);
    CHECK(s[1] == s[0] + 1);
  }
  CHECK_THROWS_AS(ParseWorldKind("galaxy"), ValidationError);
}

// A world and config small enough to train in a second or two.
RunConfig TinyRun(const fs::path& world_dir) {
  auto o = Small(WorldKind::kProbe);
  WriteWorld(GenerateWorld(o), world_dir);
  auto c = RunConfig::Load(world_dir / WorldFiles::kConfig);
  for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{
           {"text.min_count", "1"},
           {"lm.word_dim", "8"},
           {"lm.hidden", "8"},
           {"lm.embed_dim", "8"},
           {"lm.epochs", "2"},
           {"lm.batch", "16"},
           {"align.translator_hidden", "8"},
           {"align.critic_hidden", "8"},
           {"align.K", "3"},
           {"align.critic_steps", "1"},
           {"align.epochs", "2"},
           {"align.batch", "16"},
           {"decode.max_len", "8"},
           {"eval.oracle_runs", "5"},
           {"eval.mixing_k", "3"},
       }) {
    c.Set(k, v);
  }
  return c;
}

const char* const kArtifacts[] = {PipelineFiles::kLm,       PipelineFiles::kGraph,  PipelineFiles::kAlign,
                                  PipelineFiles::kCaptions, PipelineFiles::kReport, PipelineFiles::kOracle,
                                  PipelineFiles::kDiagnostics};

TEST_CASE("pipeline is deterministic and resumable") {
  TempDir dir("pipe");
  const auto config = TinyRun(dir / "world");
  const auto first = RunPipeline(config, dir / "a");
  REQUIRE(first.stages.size() == 5);
  for (const auto& s : first.stages) CHECK_FALSE(s.resumed);
  CHECK(first.report.candidates == 40);

  const auto second = RunPipeline(config, dir / "b");
  for (const char* f : kArtifacts) {
    CAPTURE(f);
    CHECK(ReadFile(dir / "a" / f) == ReadFile(dir / "b" / f));
  }
  for (size_t i = 0; i < 5; ++i) CHECK(first.stages[i].key == second.stages[i].key);

  // Same directory again: nothing reruns.
  const auto again = RunPipeline(config, dir / "a");
  for (const auto& s : again.stages) CHECK(s.resumed);
  CHECK(again.report.ToJson() == first.report.ToJson());

  // A decode change reruns only caption and evaluate.
  auto wider = config;
  wider.Set("decode.beam", "2");
  const auto partial = RunPipeline(wider, dir / "a");
  CHECK(partial.stages[0].resumed);
  CHECK(partial.stages[1].resumed);
  CHECK(partial.stages[2].resumed);
  CHECK_FALSE(partial.stages[3].resumed);
  CHECK_FALSE(partial.stages[4].resumed);

  // A missing artifact forces its stage to rerun.
  fs::remove(dir / "a" / PipelineFiles::kGraph);
  const auto repaired = RunPipeline(wider, dir / "a");
  CHECK(repaired.stages[0].resumed);
  CHECK_FALSE(repaired.stages[1].resumed);
  CHECK(repaired.stages[2].resumed);  // same key, align.ckpt still present
  CHECK(ReadFile(dir / "a" / PipelineFiles::kGraph) == ReadFile(dir / "b" / PipelineFiles::kGraph));

  const auto log = ReadFile(dir / "a" / PipelineFiles::kRunLog);
  CHECK(log.find("decode.beam = 2") != std::string::npos);
}

TEST_CASE("pipeline errors name the failing stage") {
  TempDir dir("pipe_err");
  auto config = TinyRun(dir / "world");
  // Truncated feature file; only train-align reads it.
  const auto features = ReadFile(dir / "world" / "features.bin");
  WriteFile(dir / "world" / "features.bin", features.substr(0, features.size() / 2));
  try {
    RunPipeline(config, dir / "out");
    FAIL("expected an error");
  } catch (const Error& e) {
    CAPTURE(e.what());
    CHECK(std::string(e.what()).rfind("stage train-align: ", 0) == 0);
  }
  CHECK(fs::exists(dir / "out" / PipelineFiles::kLm));

  auto missing = TinyRun(dir / "world2");
  missing.paths.corpus = (dir / "nope.txt").string();
  CHECK_THROWS_AS(RunPipeline(missing, dir / "out2"), IoError);
}

}  // namespace
}  // namespace unicap
