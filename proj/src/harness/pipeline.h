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

#ifndef UNICAP_HARNESS_PIPELINE_H_
#define UNICAP_HARNESS_PIPELINE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "evaluation/eval_report.h"
#include "harness/run_config.h"

namespace unicap {

// Artifact names inside a pipeline directory.
struct PipelineFiles {
  static constexpr const char* kLm = "lm.ckpt";
  static constexpr const char* kGraph = "graph.txt";
  static constexpr const char* kAlign = "align.ckpt";
  static constexpr const char* kCaptions = "captions.tsv";
  static constexpr const char* kReport = "report.json";
  static constexpr const char* kOracle = "oracle.json";
  static constexpr const char* kDiagnostics = "diagnostics.json";
  static constexpr const char* kRunLog = "run.log";
  static constexpr const char* kStamps = "stamps";
};

struct StageStatus {
  std::string name;
  std::string key;  // content hash of the stage's inputs and settings
  bool resumed = false;
};

struct PipelineResult {
  EvalReport report;
  std::vector<StageStatus> stages;
};

// train-lm -> build-graph -> train-align -> caption -> evaluate. A stage whose
// stamp matches its key and whose outputs exist is skipped. Errors propagate
// with the stage name prefixed; finished artifacts are left in place.
PipelineResult RunPipeline(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace unicap

#endif  // UNICAP_HARNESS_PIPELINE_H_
