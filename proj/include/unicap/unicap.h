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

/* C interface to the unicap captioning library.
 *
 * Every function returns a uc_status. On failure the message is available
 * from uc_last_error() on the calling thread until the next call. Strings
 * returned through char** out-parameters are heap-allocated and must be
 * released with uc_string_free(). */
#ifndef UNICAP_UNICAP_H_
#define UNICAP_UNICAP_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define UC_API
#else
#define UC_API __attribute__((visibility("default")))
#endif

typedef enum uc_status {
  UC_OK = 0,
  UC_ERR_INTERNAL = 1,
  UC_ERR_VALIDATION = 2,
  UC_ERR_DIVERGENCE = 3,
  UC_ERR_IO = 4,
  UC_ERR_SHAPE = 5,
  /* Null pointer or otherwise unusable argument. */
  UC_ERR_ARGUMENT = 6
} uc_status;

UC_API const char* uc_version(void);
UC_API const char* uc_status_name(uc_status status);
UC_API const char* uc_last_error(void);
UC_API void uc_string_free(char* s);

/* 0 debug, 1 info, 2 warning (default), 3 error, 4 silent. */
UC_API uc_status uc_set_log_level(int level);

/* Run configuration: flat key = value settings. */
typedef struct uc_config uc_config;

UC_API uc_status uc_config_new(uc_config** out);
UC_API uc_status uc_config_load(const char* path, uc_config** out);
UC_API void uc_config_free(uc_config* config);
UC_API uc_status uc_config_set(uc_config* config, const char* key, const char* value);
UC_API uc_status uc_config_get(const uc_config* config, const char* key, char** value);
/* One "key = value" line per key. */
UC_API uc_status uc_config_echo(const uc_config* config, char** text);
UC_API uc_status uc_config_validate(const uc_config* config);
UC_API size_t uc_config_key_count(void);
/* NULL when index is out of range. */
UC_API const char* uc_config_key(size_t index);

/* Pipeline stages. A NULL config means defaults. */
UC_API uc_status uc_build_lexicon(const char* const* inputs, size_t input_count, const char* out, int strip_plural,
                                  int* surfaces, int* concepts);
/* Writes out, out.vocab, out.pidx and out.log. */
UC_API uc_status uc_train_lm(const uc_config* config, const char* corpus, const char* lexicon, const char* out);
UC_API uc_status uc_build_graph(const uc_config* config, const char* corpus, const char* lexicon, const char* ids,
                                const char* detections, const char* out);

typedef struct uc_align_inputs {
  const char* corpus;
  const char* lexicon;
  const char* features;
  const char* ids;
  const char* detections;
  const char* graph;
  const char* lm;
} uc_align_inputs;

/* Writes out, out.vocab and out.log. */
UC_API uc_status uc_train_align(const uc_config* config, const uc_align_inputs* inputs, const char* out);

/* image_id<TAB>caption rows. vocab may be NULL (checkpoint sidecar). */
UC_API uc_status uc_caption_file(const uc_config* config, const char* features, const char* ids, const char* checkpoint,
                                 const char* vocab, const char* out);

/* references and training may be NULL. report_json may be NULL. */
UC_API uc_status uc_evaluate(const char* candidates, const char* references, const char* training, const char* out,
                             char** report_json);

typedef struct uc_diagnose_inputs {
  const char* lm;
  const char* align;
  const char* corpus;
  const char* lexicon;
  const char* features;
  const char* ids;
  const char* detections;
} uc_diagnose_inputs;

UC_API uc_status uc_diagnose_embedding(const uc_config* config, const uc_diagnose_inputs* inputs, const char* out,
                                       char** json);

typedef struct uc_synth_options {
  uint64_t seed;
  int n_images;
  int n_sentences;
  int n_concepts;
  int feature_dim;
  double feature_noise;
  double appearance_noise;
  double detector_noise;
  int references_per_image;
  /* "probe", "control", "identity" or "clusters". */
  const char* kind;
} uc_synth_options;

UC_API void uc_synth_options_default(uc_synth_options* options);
UC_API uc_status uc_synth_generate(const uc_synth_options* options, const char* out_dir);

/* Runs every stage into out_dir; report_json may be NULL. */
UC_API uc_status uc_run_pipeline(const uc_config* config, const char* out_dir, char** report_json);

/* Captioner over a trained alignment checkpoint. */
typedef struct uc_captioner uc_captioner;

UC_API uc_status uc_captioner_load(const char* checkpoint, const char* vocab, uc_captioner** out);
UC_API void uc_captioner_free(uc_captioner* captioner);
UC_API int uc_captioner_feature_dim(const uc_captioner* captioner);
UC_API uc_status uc_captioner_caption(const uc_captioner* captioner, const float* feature, size_t dim, int beam,
                                      int max_len, char** caption);

#ifdef __cplusplus
}
#endif

#endif /* UNICAP_UNICAP_H_ */
