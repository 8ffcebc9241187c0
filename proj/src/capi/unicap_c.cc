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

// extern "C" wrappers. Each entry point catches everything and maps the
// exception type to a status code.

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "common/error.h"
#include "common/log.h"
#include "harness/pipeline.h"
#include "harness/run_config.h"
#include "harness/stages.h"
#include "harness/synthetic_world.h"
#include "inference/captioner.h"
#include "unicap/unicap.h"

struct uc_config {
  unicap::RunConfig config;
};

struct uc_captioner {
  std::unique_ptr<unicap::Captioner> captioner;
};

namespace {

thread_local std::string last_error;

template <typename F>
uc_status Guard(F&& body) {
  try {
    last_error.clear();
    body();
    return UC_OK;
  } catch (const unicap::ValidationError& e) {
    last_error = e.what();
    return UC_ERR_VALIDATION;
  } catch (const unicap::DivergenceError& e) {
    last_error = e.what();
    return UC_ERR_DIVERGENCE;
  } catch (const unicap::IoError& e) {
    last_error = e.what();
    return UC_ERR_IO;
  } catch (const unicap::ShapeError& e) {
    last_error = e.what();
    return UC_ERR_SHAPE;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return UC_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return UC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return UC_ERR_INTERNAL;
  }
}

void Require(const void* p, const char* name) {
  if (!p) throw unicap::ValidationError(std::string(name) + " must not be null");
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const unicap::RunConfig& ConfigOrDefault(const uc_config* c) {
  static const unicap::RunConfig defaults = [] {
    unicap::RunConfig r;
    r.Finalize();
    return r;
  }();
  return c ? c->config : defaults;
}

std::filesystem::path Opt(const char* p) { return p ? std::filesystem::path(p) : std::filesystem::path(); }

}  // namespace

extern "C" {

const char* uc_version(void) { return "0.1.0"; }

const char* uc_status_name(uc_status status) {
  switch (status) {
    case UC_OK:
      return "ok";
    case UC_ERR_INTERNAL:
      return "internal error";
    case UC_ERR_VALIDATION:
      return "validation error";
    case UC_ERR_DIVERGENCE:
      return "training diverged";
    case UC_ERR_IO:
      return "i/o error";
    case UC_ERR_SHAPE:
      return "shape error";
    case UC_ERR_ARGUMENT:
      return "invalid argument";
  }
  return "unknown status";
}

const char* uc_last_error(void) { return last_error.c_str(); }

void uc_string_free(char* s) { std::free(s); }

uc_status uc_set_log_level(int level) {
  if (level < 0 || level > 4) {
    last_error = "log level must be in 0..4";
    return UC_ERR_ARGUMENT;
  }
  unicap::SetLogLevel(static_cast<unicap::LogLevel>(level));
  return UC_OK;
}

uc_status uc_config_new(uc_config** out) {
  if (!out) return last_error = "out must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    auto c = std::make_unique<uc_config>();
    c->config.Finalize();
    *out = c.release();
  });
}

uc_status uc_config_load(const char* path, uc_config** out) {
  if (!path || !out) return last_error = "path and out must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    auto c = std::make_unique<uc_config>();
    c->config = unicap::RunConfig::Load(path);
    *out = c.release();
  });
}

void uc_config_free(uc_config* config) { delete config; }

uc_status uc_config_set(uc_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return last_error = "config, key and value must not be null", UC_ERR_ARGUMENT;
  return Guard([&] { config->config.Set(key, value); });
}

uc_status uc_config_get(const uc_config* config, const char* key, char** value) {
  if (!config || !key || !value) return last_error = "config, key and value must not be null", UC_ERR_ARGUMENT;
  return Guard([&] { *value = Dup(config->config.Get(key)); });
}

uc_status uc_config_echo(const uc_config* config, char** text) {
  if (!config || !text) return last_error = "config and text must not be null", UC_ERR_ARGUMENT;
  return Guard([&] { *text = Dup(config->config.Echo()); });
}

uc_status uc_config_validate(const uc_config* config) {
  if (!config) return last_error = "config must not be null", UC_ERR_ARGUMENT;
  return Guard([&] { config->config.Validate(); });
}

size_t uc_config_key_count(void) { return unicap::RunConfig::Keys().size(); }

const char* uc_config_key(size_t index) {
  const auto& keys = unicap::RunConfig::Keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

uc_status uc_build_lexicon(const char* const* inputs, size_t input_count, const char* out, int strip_plural,
                           int* surfaces, int* concepts) {
  if ((!inputs && input_count) || !out) return last_error = "inputs and out must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    std::vector<std::filesystem::path> in;
    for (size_t i = 0; i < input_count; ++i) {
      Require(inputs[i], "input path");
      in.emplace_back(inputs[i]);
    }
    unicap::LexiconOptions options;
    options.strip_plural = strip_plural != 0;
    const auto s = unicap::BuildLexicon(in, out, options);
    if (surfaces) *surfaces = s.surfaces;
    if (concepts) *concepts = s.concepts;
  });
}

uc_status uc_train_lm(const uc_config* config, const char* corpus, const char* lexicon, const char* out) {
  if (!corpus || !lexicon || !out) return last_error = "corpus, lexicon and out must not be null", UC_ERR_ARGUMENT;
  return Guard([&] { unicap::TrainLmStage(corpus, lexicon, ConfigOrDefault(config), out); });
}

uc_status uc_build_graph(const uc_config* config, const char* corpus, const char* lexicon, const char* ids,
                         const char* detections, const char* out) {
  if (!corpus || !lexicon || !ids || !detections || !out) return last_error = "paths must not be null", UC_ERR_ARGUMENT;
  return Guard([&] { unicap::BuildGraphStage(corpus, lexicon, ids, detections, ConfigOrDefault(config), out); });
}

uc_status uc_train_align(const uc_config* config, const uc_align_inputs* inputs, const char* out) {
  if (!inputs || !out) return last_error = "inputs and out must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    for (const char* p : {inputs->corpus, inputs->lexicon, inputs->features, inputs->ids, inputs->detections,
                          inputs->graph, inputs->lm}) {
      Require(p, "alignment input path");
    }
    unicap::AlignStageInputs in{inputs->corpus, inputs->lexicon, inputs->features, inputs->ids,
                                inputs->detections, inputs->graph, inputs->lm};
    unicap::TrainAlignStage(in, ConfigOrDefault(config), out);
  });
}

uc_status uc_caption_file(const uc_config* config, const char* features, const char* ids, const char* checkpoint,
                          const char* vocab, const char* out) {
  if (!features || !ids || !checkpoint || !out) return last_error = "paths must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    unicap::CaptionStage(features, ids, checkpoint, ConfigOrDefault(config).decode, out, Opt(vocab));
  });
}

uc_status uc_evaluate(const char* candidates, const char* references, const char* training, const char* out,
                      char** report_json) {
  if (!candidates) return last_error = "candidates must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    const auto r = unicap::EvaluateStage(candidates, Opt(references), Opt(training), Opt(out));
    if (report_json) *report_json = Dup(r.ToJson().dump(2));
  });
}

uc_status uc_diagnose_embedding(const uc_config* config, const uc_diagnose_inputs* inputs, const char* out,
                                char** json) {
  if (!inputs) return last_error = "inputs must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    for (const char* p : {inputs->lm, inputs->align, inputs->corpus, inputs->lexicon, inputs->features, inputs->ids,
                          inputs->detections}) {
      Require(p, "diagnose input path");
    }
    unicap::DiagnoseInputs in{inputs->lm,       inputs->align, inputs->corpus,    inputs->lexicon,
                              inputs->features, inputs->ids,   inputs->detections};
    const auto d = unicap::DiagnoseStage(in, ConfigOrDefault(config), Opt(out));
    if (json) *json = Dup(d.ToJson().dump(2));
  });
}

void uc_synth_options_default(uc_synth_options* options) {
  if (!options) return;
  const unicap::SynthOptions d;
  options->seed = d.seed;
  options->n_images = d.n_images;
  options->n_sentences = d.n_sentences;
  options->n_concepts = d.n_concepts;
  options->feature_dim = d.feature_dim;
  options->feature_noise = d.feature_noise;
  options->appearance_noise = d.appearance_noise;
  options->detector_noise = d.detector_noise;
  options->references_per_image = d.references_per_image;
  options->kind = "probe";
}

uc_status uc_synth_generate(const uc_synth_options* options, const char* out_dir) {
  if (!options || !out_dir) return last_error = "options and out_dir must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    unicap::SynthOptions o;
    o.seed = options->seed;
    o.n_images = options->n_images;
    o.n_sentences = options->n_sentences;
    o.n_concepts = options->n_concepts;
    o.feature_dim = options->feature_dim;
    o.feature_noise = options->feature_noise;
    o.appearance_noise = options->appearance_noise;
    o.detector_noise = options->detector_noise;
    o.references_per_image = options->references_per_image;
    o.kind = unicap::ParseWorldKind(options->kind ? options->kind : "probe");
    unicap::SynthStage(o, out_dir);
  });
}

uc_status uc_run_pipeline(const uc_config* config, const char* out_dir, char** report_json) {
  if (!config || !out_dir) return last_error = "config and out_dir must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    const auto r = unicap::RunPipeline(config->config, out_dir);
    if (report_json) *report_json = Dup(r.report.ToJson().dump(2));
  });
}

uc_status uc_captioner_load(const char* checkpoint, const char* vocab, uc_captioner** out) {
  if (!checkpoint || !out) return last_error = "checkpoint and out must not be null", UC_ERR_ARGUMENT;
  return Guard([&] {
    auto c = std::make_unique<uc_captioner>();
    c->captioner = std::make_unique<unicap::Captioner>(
        unicap::Captioner::Load(checkpoint, vocab ? std::filesystem::path(vocab) : unicap::VocabPath(checkpoint)));
    *out = c.release();
  });
}

void uc_captioner_free(uc_captioner* captioner) { delete captioner; }

int uc_captioner_feature_dim(const uc_captioner* captioner) {
  return captioner ? captioner->captioner->nets().translator().in() : -1;
}

uc_status uc_captioner_caption(const uc_captioner* captioner, const float* feature, size_t dim, int beam,
                               int max_len, char** caption) {
  if (!captioner || !feature || !caption) {
    last_error = "captioner, feature and caption must not be null";
    return UC_ERR_ARGUMENT;
  }
  return Guard([&] {
    if (static_cast<int>(dim) != captioner->captioner->nets().translator().in()) {
      throw unicap::ShapeError("feature has dimension " + std::to_string(dim) + ", expected " +
                                    std::to_string(captioner->captioner->nets().translator().in()));
    }
    unicap::CaptionOptions o;
    o.beam = beam;
    o.max_len = max_len;
    if (beam < 1 || max_len < 1) throw unicap::ValidationError("beam and max_len must be >= 1");
    *caption = Dup(captioner->captioner->Caption(std::span<const float>(feature, dim), o));
  });
}

}  // extern "C"
