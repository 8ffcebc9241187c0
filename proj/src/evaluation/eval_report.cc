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

#include "evaluation/eval_report.h"

#include <fstream>
#include <map>
#include <set>

#include "common/error.h"
#include "common/strings.h"
#include "text_corpus/tokenizer.h"

namespace unicap {

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json j;
  for (int n = 0; n < kMaxBleuOrder; ++n) {
    j["bleu" + std::to_string(n + 1)] = scored ? nlohmann::json(bleu[n]) : nlohmann::json(nullptr);
  }
  j["rougeL"] = scored ? nlohmann::json(rouge_l) : nlohmann::json(nullptr);
  j["unique_rate"] = unique_rate;
  j["novel_rate"] = novel_rate;
  j["mixing_score"] = mixing_score ? nlohmann::json(*mixing_score) : nlohmann::json(nullptr);
  j["candidates"] = candidates;
  return j;
}

EvalReport EvalReport::FromJson(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.scored = !j.at("rougeL").is_null();
    if (r.scored) {
      for (int n = 0; n < kMaxBleuOrder; ++n) r.bleu[n] = j.at("bleu" + std::to_string(n + 1)).get<double>();
      r.rouge_l = j.at("rougeL").get<double>();
    }
    r.unique_rate = j.at("unique_rate").get<double>();
    r.novel_rate = j.at("novel_rate").get<double>();
    if (j.contains("mixing_score") && !j["mixing_score"].is_null()) r.mixing_score = j["mixing_score"].get<double>();
    r.candidates = j.at("candidates").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad report: ") + e.what());
  }
  return r;
}

void WriteReport(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << report.ToJson().dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

EvalReport ReadReport(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return EvalReport::FromJson(j);
}

std::string NormalizeCaption(const std::string& text) { return Join(Tokenize(text), " "); }

EvalReport EvaluateCaptions(const std::vector<std::pair<std::string, std::string>>& candidates,
                            const std::vector<std::pair<std::string, std::string>>& references,
                            const std::vector<std::string>& training_captions) {
  std::map<std::string, std::vector<Tokens>> refs;
  for (const auto& [id, text] : references) refs[id].push_back(Tokenize(text));
  std::vector<Tokens> cands;
  std::vector<std::vector<Tokens>> cand_refs;
  std::vector<std::string> generated;
  std::set<std::string> seen_ids;
  for (const auto& [id, text] : candidates) {
    if (!seen_ids.insert(id).second) throw ValidationError("duplicate candidate for image " + id);
    auto it = refs.find(id);
    if (it == refs.end()) throw ValidationError("no reference for image " + id);
    cands.push_back(Tokenize(text));
    cand_refs.push_back(it->second);
    generated.push_back(Join(cands.back(), " "));
  }
  EvalReport r;
  BleuStats stats;
  for (size_t i = 0; i < cands.size(); ++i) stats.Add(cands[i], cand_refs[i]);
  for (int n = 1; n <= kMaxBleuOrder; ++n) r.bleu[n - 1] = BleuFromStats(stats, n);
  r.rouge_l = CorpusRougeL(cands, cand_refs);
  std::vector<std::string> training;
  training.reserve(training_captions.size());
  for (const auto& t : training_captions) training.push_back(NormalizeCaption(t));
  const auto un = UniqueNovelRates(generated, training);
  r.unique_rate = un.unique_rate;
  r.novel_rate = un.novel_rate;
  r.candidates = static_cast<int64_t>(cands.size());
  return r;
}

EvalReport DescribeCaptions(const std::vector<std::pair<std::string, std::string>>& candidates,
                            const std::vector<std::string>& training_captions) {
  std::vector<std::string> generated, training;
  for (const auto& c : candidates) generated.push_back(NormalizeCaption(c.second));
  for (const auto& t : training_captions) training.push_back(NormalizeCaption(t));
  EvalReport r;
  r.scored = false;
  const auto un = UniqueNovelRates(generated, training);
  r.unique_rate = un.unique_rate;
  r.novel_rate = un.novel_rate;
  r.candidates = static_cast<int64_t>(candidates.size());
  return r;
}

}  // namespace unicap
