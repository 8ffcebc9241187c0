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

#ifndef UNICAP_EVALUATION_EVAL_REPORT_H_
#define UNICAP_EVALUATION_EVAL_REPORT_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evaluation/metrics.h"
#include "json.hpp"

namespace unicap {

struct EvalReport {
  // False when no references were available; BLEU and ROUGE-L are then
  // meaningless and serialized as null.
  bool scored = true;
  std::array<double, kMaxBleuOrder> bleu{};  // BLEU-1..4
  double rouge_l = 0;
  double unique_rate = 0;
  double novel_rate = 0;
  std::optional<double> mixing_score;
  int64_t candidates = 0;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);
};

void WriteReport(const std::filesystem::path& path, const EvalReport& report);
EvalReport ReadReport(const std::filesystem::path& path);

// Whitespace/punctuation tokens joined by single spaces; the form used for
// the unique and novel comparisons.
std::string NormalizeCaption(const std::string& text);

// candidates: image_id -> caption, one per id. references: image_id ->
// reference, ids may repeat. Every candidate id needs a reference.
EvalReport EvaluateCaptions(const std::vector<std::pair<std::string, std::string>>& candidates,
                            const std::vector<std::pair<std::string, std::string>>& references,
                            const std::vector<std::string>& training_captions);

// Unique and novel rates only.
EvalReport DescribeCaptions(const std::vector<std::pair<std::string, std::string>>& candidates,
                            const std::vector<std::string>& training_captions);

}  // namespace unicap

#endif  // UNICAP_EVALUATION_EVAL_REPORT_H_
