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

#ifndef UNICAP_ALIGNMENT_IMAGE_DATA_H_
#define UNICAP_ALIGNMENT_IMAGE_DATA_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "concept_lexicon/concept_lexicon.h"
#include "nn/matrix.h"

namespace unicap {

// Row-major image feature matrix with one id per row.
struct FeatureTable {
  std::vector<std::string> ids;
  nn::Matrix<float> features;

  int count() const { return features.rows(); }
  int dim() const { return features.cols(); }
};

// "IMGF1", u32 count, u32 dim, float32 values; ids in a text sidecar, one
// per line in row order.
void WriteFeatures(const std::filesystem::path& features_path, const std::filesystem::path& ids_path,
                   const FeatureTable& table);
FeatureTable ReadFeatures(const std::filesystem::path& features_path, const std::filesystem::path& ids_path);

// image_id<TAB>label[,label...]. Returns raw labels per image id.
std::map<std::string, std::vector<std::string>> ReadDetections(const std::filesystem::path& path);
void WriteDetections(const std::filesystem::path& path,
                     const std::map<std::string, std::vector<std::string>>& detections);

// Maps detector labels (surface forms or concept ids) to concepts and adds
// their hyponyms. Unknown labels are skipped with a warning.
ConceptSet ResolveDetections(const std::vector<std::string>& labels, const ConceptLexicon& lex);

struct ImageSet {
  FeatureTable table;
  // Hyponym-expanded concepts per row; empty when the image has no usable
  // detection.
  std::vector<ConceptSet> concepts;
};

// Images without a detections line get an empty concept set.
ImageSet LoadImages(const std::filesystem::path& features_path, const std::filesystem::path& ids_path,
                    const std::filesystem::path& detections_path, const ConceptLexicon& lex);

// Multi-hot vector over lex.concepts() order.
std::vector<float> ConceptVector(const ConceptSet& concepts, const ConceptLexicon& lex);

// image_id<TAB>text, ids may repeat.
std::vector<std::pair<std::string, std::string>> ReadIdTextPairs(const std::filesystem::path& path);
void WriteIdTextPairs(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& rows);

}  // namespace unicap

#endif  // UNICAP_ALIGNMENT_IMAGE_DATA_H_
