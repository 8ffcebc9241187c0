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

#include "harness/pipeline.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "common/error.h"
#include "common/hash.h"
#include "common/log.h"
#include "common/rng.h"
#include "common/strings.h"
#include "harness/stages.h"
#include "text_corpus/tokenizer.h"

namespace unicap {
namespace {

// Seed stream of the oracle's tie sampling.
constexpr uint64_t kOracleStream = 6000;

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void WriteAll(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, p);
}

template <typename E>
[[noreturn]] void Rethrow(const std::string& stage, const E& e) {
  throw E("stage " + stage + ": " + e.what());
}

class Runner {
 public:
  Runner(const RunConfig& config, fs::path dir) : config_(config), dir_(std::move(dir)) {}

  // Settings whose keys start with any prefix, plus the hashes of the named
  // input files and upstream keys.
  std::string Key(const std::string& stage, const std::vector<std::string>& prefixes,
                  const std::vector<std::string>& upstream) const {
    std::string text = stage + "\n";
    for (const auto& key : RunConfig::Keys()) {
      bool match = false;
      for (const auto& p : prefixes) match = match || StartsWith(key, p);
      if (!match) continue;
      const std::string value = config_.Get(key);
      if (StartsWith(key, "paths.")) {
        text += key + " " + (value.empty() ? "-" : InputHash(value)) + "\n";
      } else {
        text += key + " = " + value + "\n";
      }
    }
    for (const auto& u : upstream) text += "after " + u + " " + keys_.at(u) + "\n";
    return GitBlobHash(text);
  }

  void Stage(const std::string& name, const std::vector<std::string>& prefixes,
             const std::vector<std::string>& upstream, const std::vector<fs::path>& outputs,
             const std::function<void()>& body) {
    StageStatus status;
    status.name = name;
    status.key = Key(name, prefixes, upstream);
    keys_[name] = status.key;
    const fs::path stamp = dir_ / PipelineFiles::kStamps / (name + ".stamp");
    bool done = fs::exists(stamp) && ReadAll(stamp) == status.key + "\n";
    for (const auto& o : outputs) done = done && fs::exists(o);
    if (done) {
      status.resumed = true;
      LogInfo("stage " + name + ": up to date");
    } else {
      LogInfo("stage " + name + ": running");
      fs::remove(stamp);
      try {
        body();
      } catch (const ValidationError& e) {
        Rethrow(name, e);
      } catch (const IoError& e) {
        Rethrow(name, e);
      } catch (const DivergenceError& e) {
        Rethrow(name, e);
      } catch (const ShapeError& e) {
        Rethrow(name, e);
      } catch (const Error& e) {
        Rethrow(name, e);
      } catch (const std::exception& e) {
        throw Error("stage " + name + ": " + e.what());
      }
      WriteAll(stamp, status.key + "\n");
    }
    stages_.push_back(status);
  }

  std::string InputHash(const std::string& path) const {
    auto it = hashes_.find(path);
    if (it != hashes_.end()) return it->second;
    if (!fs::exists(path)) throw IoError("input file not found: " + path);
    return hashes_[path] = GitBlobHashFile(path);
  }

  const std::vector<StageStatus>& stages() const { return stages_; }

 private:
  const RunConfig& config_;
  fs::path dir_;
  std::map<std::string, std::string> keys_;
  mutable std::map<std::string, std::string> hashes_;
  std::vector<StageStatus> stages_;
};

void CheckInputs(const RunConfig& c) {
  const std::pair<const char*, const std::string*> required[] = {
      {"paths.corpus", &c.paths.corpus},     {"paths.lexicon", &c.paths.lexicon},
      {"paths.features", &c.paths.features}, {"paths.ids", &c.paths.ids},
      {"paths.detections", &c.paths.detections}};
  for (const auto& [key, value] : required) {
    if (value->empty()) throw ValidationError(std::string(key) + " is required by run-pipeline");
  }
}

std::string RunLogText(const RunConfig& c, const Runner& runner) {
  std::ostringstream log;
  log << "# run log\n[config]\n" << c.Echo() << "[seeds]\n";
  log << "seed = " << c.seed << "\n";
  log << "lm.init = " << DeriveSeed(c.seed, 1) << "\n";
  log << "align.translator_init = " << DeriveSeed(c.seed, 11) << "\n";
  log << "align.critic_init = " << DeriveSeed(c.seed, 12) << "\n";
  log << "oracle = " << DeriveSeed(c.seed, kOracleStream) << "\n";
  log << "# per-epoch streams: lm shuffle 1000+e, lm triplets 2000+e, align shuffle 3000+e,"
         " generator sampling 4000+e, critic sampling 5000+e\n";
  log << "[inputs]\n";
  for (const auto& key : RunConfig::Keys()) {
    if (!StartsWith(key, "paths.")) continue;
    const auto v = c.Get(key);
    if (v.empty()) continue;
    log << key << " " << runner.InputHash(v) << " " << v << "\n";
  }
  return log.str();
}

}  // namespace

PipelineResult RunPipeline(const RunConfig& config, const fs::path& out_dir) {
  config.Validate();
  CheckInputs(config);
  fs::create_directories(out_dir / PipelineFiles::kStamps);
  Runner runner(config, out_dir);
  const auto& p = config.paths;
  const fs::path lm = out_dir / PipelineFiles::kLm, graph = out_dir / PipelineFiles::kGraph,
                 align = out_dir / PipelineFiles::kAlign, captions = out_dir / PipelineFiles::kCaptions,
                 report_path = out_dir / PipelineFiles::kReport;
  const std::string header = RunLogText(config, runner);
  WriteAll(out_dir / PipelineFiles::kRunLog, header);

  runner.Stage("train-lm", {"seed", "paths.corpus", "paths.lexicon", "paths.word_vectors", "lexicon.", "text.", "lm."},
               {}, {lm, VocabPath(lm)}, [&] { TrainLmStage(p.corpus, p.lexicon, config, lm); });
  runner.Stage("build-graph", {"paths.corpus", "paths.lexicon", "paths.ids", "paths.detections", "lexicon.", "text."},
               {}, {graph}, [&] { BuildGraphStage(p.corpus, p.lexicon, p.ids, p.detections, config, graph); });
  runner.Stage("train-align",
               {"seed", "paths.corpus", "paths.lexicon", "paths.features", "paths.ids", "paths.detections", "lexicon.",
                "text.", "align."},
               {"train-lm", "build-graph"}, {align, VocabPath(align)}, [&] {
                 TrainAlignStage({p.corpus, p.lexicon, p.features, p.ids, p.detections, graph, lm}, config, align);
               });
  runner.Stage("caption", {"paths.features", "paths.ids", "decode."}, {"train-align"}, {captions},
               [&] { CaptionStage(p.features, p.ids, align, config.decode, captions); });

  PipelineResult result;
  runner.Stage("evaluate", {"seed", "paths.references", "paths.corpus", "paths.detections", "eval."},
               {"caption", "build-graph"},
               p.references.empty()
                   ? std::vector<fs::path>{report_path, out_dir / PipelineFiles::kDiagnostics}
                   : std::vector<fs::path>{report_path, out_dir / PipelineFiles::kDiagnostics,
                                           out_dir / PipelineFiles::kOracle},
               [&] {
                 auto report = EvaluateStage(captions, p.references, p.corpus, {});
                 DiagnoseInputs d{lm, align, p.corpus, p.lexicon, p.features, p.ids, p.detections};
                 const auto diag = DiagnoseStage(d, config, out_dir / PipelineFiles::kDiagnostics);
                 if (std::isfinite(diag.mixing.score)) report.mixing_score = diag.mixing.score;
                 WriteReport(report_path, report);
                 if (p.references.empty()) return;
                 // Oracle over the weak assignments.
                 const auto lex = ConceptLexicon::Load(p.lexicon, config.lexicon);
                 const Corpus corpus = BuildCorpus(p.corpus, lex, config.text);
                 const auto g = AssignmentGraph::Load(graph);
                 std::vector<Tokens> sentences;
                 for (const auto& r : corpus.records) sentences.push_back(r.words);
                 const auto table = ReadFeatures(p.features, p.ids);
                 std::map<std::string, std::vector<Tokens>> by_id;
                 for (const auto& [id, text] : ReadIdTextPairs(p.references)) by_id[id].push_back(Tokenize(text));
                 std::vector<std::vector<Tokens>> refs;
                 for (const auto& id : table.ids) refs.push_back(by_id[id]);
                 Rng rng(DeriveSeed(config.seed, kOracleStream));
                 const auto oracle = OracleBaseline(g, sentences, refs, config.eval.oracle_runs, rng);
                 auto j = oracle.report.ToJson();
                 j["best_run"] = oracle.best_run;
                 j["runs"] = config.eval.oracle_runs;
                 j["excluded_images"] = oracle.excluded;
                 WriteAll(out_dir / PipelineFiles::kOracle, j.dump(2) + "\n");
               });
  result.report = ReadReport(report_path);
  result.stages = runner.stages();

  std::string log = header + "[stages]\n";
  for (const auto& s : result.stages) log += s.name + " " + s.key + (s.resumed ? " resumed\n" : " ran\n");
  WriteAll(out_dir / PipelineFiles::kRunLog, log);
  return result;
}

}  // namespace unicap
