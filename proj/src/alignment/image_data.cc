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

#include "alignment/image_data.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "common/binary_io.h"
#include "common/error.h"
#include "common/log.h"
#include "common/strings.h"
#include "text_corpus/corpus.h"

namespace unicap {

namespace {

std::ofstream OpenOut(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

void WriteFeatures(const std::filesystem::path& features_path, const std::filesystem::path& ids_path,
                   const FeatureTable& table) {
  if (static_cast<int>(table.ids.size()) != table.count()) {
    throw ValidationError("feature table has " + std::to_string(table.count()) + " rows but " +
                          std::to_string(table.ids.size()) + " ids");
  }
  auto out = OpenOut(features_path, std::ios::binary);
  binio::WriteBytes(out, "IMGF1");
  binio::WriteU32(out, static_cast<uint32_t>(table.count()));
  binio::WriteU32(out, static_cast<uint32_t>(table.dim()));
  for (float v : table.features.values()) binio::WriteF32(out, v);
  auto ids = OpenOut(ids_path);
  for (const auto& id : table.ids) ids << id << '\n';
}

FeatureTable ReadFeatures(const std::filesystem::path& features_path, const std::filesystem::path& ids_path) {
  std::ifstream in(features_path, std::ios::binary);
  if (!in) throw IoError("cannot open features " + features_path.string());
  FeatureTable t;
  try {
    binio::ExpectMagic(in, "IMGF1", features_path.string());
    const uint32_t count = binio::ReadU32(in);
    const uint32_t dim = binio::ReadU32(in);
    if (count == 0 || dim == 0) throw ValidationError(features_path.string() + ": empty feature table");
    t.features = nn::Matrix<float>(static_cast<int>(count), static_cast<int>(dim));
    for (float& v : t.features.values()) {
      v = binio::ReadF32(in);
      if (!std::isfinite(v)) throw ValidationError(features_path.string() + ": non-finite feature value");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
      throw ValidationError(features_path.string() + ": trailing bytes after feature values");
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(features_path.string() + ": " + e.what());
  }
  for (auto& line : ReadLines(ids_path)) {
    const auto id = Trim(line);
    if (!id.empty()) t.ids.emplace_back(id);
  }
  if (static_cast<int>(t.ids.size()) != t.count()) {
    throw ValidationError(ids_path.string() + ": " + std::to_string(t.ids.size()) + " ids for " +
                          std::to_string(t.count()) + " feature rows");
  }
  return t;
}

std::map<std::string, std::vector<std::string>> ReadDetections(const std::filesystem::path& path) {
  std::map<std::string, std::vector<std::string>> out;
  const auto lines = ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty() || line[0] == '#') continue;
    const auto fields = Split(line, '\t');
    if (fields.size() > 2 || Trim(fields[0]).empty()) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": expected image_id<TAB>labels");
    }
    auto& labels = out[std::string(Trim(fields[0]))];
    if (fields.size() == 2) {
      for (const auto& l : Split(fields[1], ',')) {
        const auto label = Trim(l);
        if (!label.empty()) labels.emplace_back(label);
      }
    }
  }
  return out;
}

void WriteDetections(const std::filesystem::path& path,
                     const std::map<std::string, std::vector<std::string>>& detections) {
  auto out = OpenOut(path);
  for (const auto& [id, labels] : detections) out << id << '\t' << Join(labels, ",") << '\n';
}

ConceptSet ResolveDetections(const std::vector<std::string>& labels, const ConceptLexicon& lex) {
  ConceptSet detected;
  for (const auto& label : labels) {
    if (lex.HasConcept(label)) {
      detected.Insert(label);
      continue;
    }
    std::string surface = ToLower(label);
    std::replace(surface.begin(), surface.end(), ' ', '_');
    if (auto c = lex.Lookup(surface)) {
      detected.Insert(*c);
    } else {
      LogWarning("detector label '" + label + "' is not in the lexicon; skipped");
    }
  }
  return lex.ExpandHyponyms(detected);
}

ImageSet LoadImages(const std::filesystem::path& features_path, const std::filesystem::path& ids_path,
                    const std::filesystem::path& detections_path, const ConceptLexicon& lex) {
  ImageSet set;
  set.table = ReadFeatures(features_path, ids_path);
  const auto detections = ReadDetections(detections_path);
  set.concepts.resize(set.table.ids.size());
  for (size_t i = 0; i < set.table.ids.size(); ++i) {
    auto it = detections.find(set.table.ids[i]);
    if (it != detections.end()) set.concepts[i] = ResolveDetections(it->second, lex);
  }
  return set;
}

std::vector<float> ConceptVector(const ConceptSet& concepts, const ConceptLexicon& lex) {
  std::vector<float> v(lex.concept_count(), 0.0f);
  for (const auto& c : concepts) {
    const int idx = lex.ConceptIndex(c);
    if (idx >= 0) v[idx] = 1.0f;
  }
  return v;
}

std::vector<std::pair<std::string, std::string>> ReadIdTextPairs(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> rows;
  const auto lines = ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || Trim(line.substr(0, tab)).empty()) {
      throw ValidationError(path.string() + ":" + std::to_string(i + 1) + ": expected image_id<TAB>text");
    }
    rows.emplace_back(std::string(Trim(line.substr(0, tab))), std::string(line.substr(tab + 1)));
  }
  return rows;
}

void WriteIdTextPairs(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& rows) {
  auto out = OpenOut(path);
  for (const auto& [id, text] : rows) out << id << '\t' << text << '\n';
}

}  // namespace unicap
