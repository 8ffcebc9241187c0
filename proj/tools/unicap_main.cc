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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "unicap/unicap.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

int ExitCode(uc_status s) {
  switch (s) {
    case UC_OK:
      return kExitOk;
    case UC_ERR_VALIDATION:
    case UC_ERR_IO:
    case UC_ERR_ARGUMENT:
      return kExitValidation;
    case UC_ERR_DIVERGENCE:
      return kExitDivergence;
    default:
      return kExitInternal;
  }
}

struct CliFailure {
  uc_status status;
};

void Check(uc_status s) {
  if (s != UC_OK) throw CliFailure{s};
}

struct ConfigDeleter {
  void operator()(uc_config* c) const { uc_config_free(c); }
};
using ConfigPtr = std::unique_ptr<uc_config, ConfigDeleter>;

// Options shared by the commands that take a run config.
struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;

  void Attach(CLI::App* app) {
    app->add_option("--config", path, "run config (key = value lines)")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "override one setting, key=value (repeatable)");
  }

  ConfigPtr Build() const {
    uc_config* c = nullptr;
    Check(path.empty() ? uc_config_new(&c) : uc_config_load(path.c_str(), &c));
    ConfigPtr out(c);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
        throw CliFailure{UC_ERR_VALIDATION};
      }
      Check(uc_config_set(c, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    Check(uc_config_validate(c));
    return out;
  }
};

void PrintAndFree(char* text) {
  if (!text) return;
  std::printf("%s\n", text);
  uc_string_free(text);
}

const char* OrNull(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised image captioning through a shared concept-structured embedding space"};
  app.require_subcommand(1);
  int verbosity = 2;
  app.add_option("--log-level", verbosity, "0 debug, 1 info, 2 warning, 3 error, 4 silent")->check(CLI::Range(0, 4));

  // build-lexicon
  auto* lexicon_cmd = app.add_subcommand("build-lexicon", "merge, validate and canonicalize lexicon files");
  std::vector<std::string> lexicon_in;
  std::string lexicon_out;
  bool strip_plural = false;
  lexicon_cmd->add_option("--in", lexicon_in, "input lexicon file (repeatable)")->required()->check(CLI::ExistingFile);
  lexicon_cmd->add_option("--out", lexicon_out, "output lexicon")->required();
  lexicon_cmd->add_flag("--strip-plural", strip_plural, "retry unknown tokens without a trailing s");

  // train-lm
  auto* lm_cmd = app.add_subcommand("train-lm", "train the sentence autoencoder");
  std::string corpus, lexicon, out;
  ConfigArgs lm_cfg;
  lm_cmd->add_option("--corpus", corpus, "one sentence per line")->required()->check(CLI::ExistingFile);
  lm_cmd->add_option("--lexicon", lexicon, "concept lexicon")->required()->check(CLI::ExistingFile);
  lm_cmd->add_option("--out", out, "checkpoint path")->required();
  lm_cfg.Attach(lm_cmd);

  // build-graph
  auto* graph_cmd = app.add_subcommand("build-graph", "weak image-sentence assignment graph");
  std::string ids, detections;
  ConfigArgs graph_cfg;
  graph_cmd->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--lexicon", lexicon)->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--ids", ids, "image ids, one per line")->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--detections", detections, "image_id<TAB>label,...")->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--out", out)->required();
  graph_cfg.Attach(graph_cmd);

  // train-align
  auto* align_cmd = app.add_subcommand("train-align", "train translator, critic and decoder");
  std::string features, graph, lm_ckpt, ablation;
  ConfigArgs align_cfg;
  align_cmd->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--lexicon", lexicon)->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--features", features)->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--ids", ids)->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--detections", detections)->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--graph", graph)->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--lm", lm_ckpt, "language model checkpoint")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--ablation", ablation,
                        "align-only (decoder frozen, L2 mean), mle, joint-l2, joint-robust, joint-adv");
  align_cmd->add_option("--out", out)->required();
  align_cfg.Attach(align_cmd);

  // caption
  auto* caption_cmd = app.add_subcommand("caption", "caption every image of a feature file");
  std::string ckpt, vocab;
  int beam = 0, max_len = 0;
  ConfigArgs caption_cfg;
  caption_cmd->add_option("--features", features)->required()->check(CLI::ExistingFile);
  caption_cmd->add_option("--ids", ids)->required()->check(CLI::ExistingFile);
  caption_cmd->add_option("--ckpt", ckpt, "alignment checkpoint")->required()->check(CLI::ExistingFile);
  caption_cmd->add_option("--vocab", vocab, "vocabulary (default: <ckpt>.vocab)");
  caption_cmd->add_option("--beam", beam, "beam width (default 3)")->check(CLI::PositiveNumber);
  caption_cmd->add_option("--max-len", max_len, "maximum caption length")->check(CLI::PositiveNumber);
  caption_cmd->add_option("--out", out, "image_id<TAB>caption")->required();
  caption_cfg.Attach(caption_cmd);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "BLEU, ROUGE-L and unique/novel rates");
  std::string candidates, references, training;
  eval_cmd->add_option("--candidates", candidates)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--references", references, "image_id<TAB>reference")->check(CLI::ExistingFile);
  eval_cmd->add_option("--training", training, "training sentences, for the novel rate")->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", out, "report.json");

  // diagnose-embedding
  auto* diag_cmd =
      app.add_subcommand("diagnose-embedding", "modality mixing and concept clustering of the joint space");
  std::string align_ckpt;
  ConfigArgs diag_cfg;
  diag_cmd->add_option("--lm", lm_ckpt)->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--align", align_ckpt)->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--lexicon", lexicon)->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--features", features)->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--ids", ids)->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--detections", detections)->required()->check(CLI::ExistingFile);
  diag_cmd->add_option("--out", out, "diagnostics.json");
  diag_cfg.Attach(diag_cmd);

  // synth-gen
  auto* synth_cmd = app.add_subcommand("synth-gen", "write a synthetic world");
  uc_synth_options synth;
  uc_synth_options_default(&synth);
  std::string kind = "probe";
  synth_cmd->add_option("--out", out, "output directory")->required();
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--images", synth.n_images);
  synth_cmd->add_option("--sentences", synth.n_sentences);
  synth_cmd->add_option("--concepts", synth.n_concepts);
  synth_cmd->add_option("--feature-dim", synth.feature_dim);
  synth_cmd->add_option("--feature-noise", synth.feature_noise, "std-dev of noise on concept strengths");
  synth_cmd->add_option("--appearance-noise", synth.appearance_noise, "std-dev of per-dimension feature noise");
  synth_cmd->add_option("--detector-noise", synth.detector_noise);
  synth_cmd->add_option("--references", synth.references_per_image, "references per image");
  synth_cmd->add_option("--kind", kind, "probe, control, identity or clusters");

  // run-pipeline
  auto* run_cmd = app.add_subcommand("run-pipeline", "train-lm, build-graph, train-align, caption, evaluate");
  ConfigArgs run_cfg;
  run_cmd->add_option("--out", out, "artifact directory")->required();
  run_cmd->add_option("--ablation", ablation, "overrides align.ablation");
  run_cfg.Attach(run_cmd);
  run_cmd->get_option("--config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    Check(uc_set_log_level(verbosity));
    if (*lexicon_cmd) {
      std::vector<const char*> in;
      for (const auto& s : lexicon_in) in.push_back(s.c_str());
      int surfaces = 0, concepts = 0;
      Check(uc_build_lexicon(in.data(), in.size(), lexicon_out.c_str(), strip_plural, &surfaces, &concepts));
      std::printf("%d surface forms, %d concepts\n", surfaces, concepts);
    } else if (*lm_cmd) {
      auto c = lm_cfg.Build();
      Check(uc_train_lm(c.get(), corpus.c_str(), lexicon.c_str(), out.c_str()));
    } else if (*graph_cmd) {
      auto c = graph_cfg.Build();
      Check(uc_build_graph(c.get(), corpus.c_str(), lexicon.c_str(), ids.c_str(), detections.c_str(), out.c_str()));
    } else if (*align_cmd) {
      auto c = align_cfg.Build();
      if (!ablation.empty()) Check(uc_config_set(c.get(), "align.ablation", ablation.c_str()));
      uc_align_inputs in{corpus.c_str(),     lexicon.c_str(), features.c_str(), ids.c_str(),
                         detections.c_str(), graph.c_str(),   lm_ckpt.c_str()};
      Check(uc_train_align(c.get(), &in, out.c_str()));
    } else if (*caption_cmd) {
      auto c = caption_cfg.Build();
      if (beam) Check(uc_config_set(c.get(), "decode.beam", std::to_string(beam).c_str()));
      if (max_len) Check(uc_config_set(c.get(), "decode.max_len", std::to_string(max_len).c_str()));
      Check(uc_caption_file(c.get(), features.c_str(), ids.c_str(), ckpt.c_str(), OrNull(vocab), out.c_str()));
    } else if (*eval_cmd) {
      char* json = nullptr;
      Check(uc_evaluate(candidates.c_str(), OrNull(references), OrNull(training), OrNull(out), &json));
      PrintAndFree(json);
    } else if (*diag_cmd) {
      auto c = diag_cfg.Build();
      uc_diagnose_inputs in{lm_ckpt.c_str(), align_ckpt.c_str(), corpus.c_str(),    lexicon.c_str(),
                            features.c_str(), ids.c_str(),       detections.c_str()};
      char* json = nullptr;
      Check(uc_diagnose_embedding(c.get(), &in, OrNull(out), &json));
      PrintAndFree(json);
    } else if (*synth_cmd) {
      synth.kind = kind.c_str();
      Check(uc_synth_generate(&synth, out.c_str()));
    } else if (*run_cmd) {
      auto c = run_cfg.Build();
      if (!ablation.empty()) Check(uc_config_set(c.get(), "align.ablation", ablation.c_str()));
      char* json = nullptr;
      Check(uc_run_pipeline(c.get(), out.c_str(), &json));
      PrintAndFree(json);
    }
  } catch (const CliFailure& f) {
    const char* msg = uc_last_error();
    if (msg && *msg) std::fprintf(stderr, "error: %s\n", msg);
    return ExitCode(f.status);
  }
  return kExitOk;
}
