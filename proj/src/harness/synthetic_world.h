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

#ifndef UNICAP_HARNESS_SYNTHETIC_WORLD_H_
#define UNICAP_HARNESS_SYNTHETIC_WORLD_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nn/matrix.h"

namespace unicap {

enum class WorldKind {
  // Concept 0 ("boat") always brings concept 1 ("water"); water is never
  // detected.
  kProbe,
  // Same inventory, but boat and water never share a scene.
  kControl,
  // Every scene holds exactly one concept; nothing co-occurs.
  kIdentity,
  // Concepts pair up (2k, 2k+1); scenes are one pair led by the even one.
  kClusters,
};
WorldKind ParseWorldKind(std::string_view name);
std::string_view WorldKindName(WorldKind kind);

struct SynthOptions {
  uint64_t seed = 1;
  int n_images = 200;
  int n_sentences = 500;
  int n_concepts = 8;
  int feature_dim = 2048;
  // Std-dev of the gaussian added to the concept indicator.
  double feature_noise = 0.1;
  // Std-dev of independent per-dimension gaussian noise on the final
  // feature; image variation that says nothing about concepts.
  double appearance_noise = 0;
  // Each true label is missed with this probability, and a spurious label is
  // added with the same probability.
  double detector_noise = 0;
  int references_per_image = 5;
  WorldKind kind = WorldKind::kProbe;

  void Validate() const;
};

// Scene concepts; the first is the one a caption mentions first.
using Scene = std::vector<int>;

struct SyntheticWorld {
  SynthOptions options;
  std::vector<std::string> words;        // surface form per concept
  std::vector<std::string> concept_ids;  // "<word>.n.01"
  std::vector<bool> detectable;
  std::vector<std::vector<double>> cooccurrence;
  int probe_a = -1;  // detectable member of the probe pair
  int probe_b = -1;

  std::vector<std::string> sentences;
  std::vector<Scene> sentence_scenes;
  std::vector<std::string> image_ids;
  std::vector<Scene> image_scenes;
  nn::Matrix<float> features;
  std::vector<std::vector<std::string>> detections;  // surface labels per image
  std::vector<std::pair<std::string, std::string>> references;
};

SyntheticWorld GenerateWorld(const SynthOptions& options);

// File names written by WriteWorld.
struct WorldFiles {
  static constexpr const char* kCorpus = "corpus.txt";
  static constexpr const char* kLexicon = "lexicon.tsv";
  static constexpr const char* kFeatures = "features.bin";
  static constexpr const char* kIds = "ids.txt";
  static constexpr const char* kDetections = "detections.tsv";
  static constexpr const char* kReferences = "references.tsv";
  static constexpr const char* kWorld = "world.json";
  static constexpr const char* kConfig = "run.cfg";
};

// Corpus, lexicon, features + ids, detections, ground-truth references,
// world description, and a run config pointing at them.
void WriteWorld(const SyntheticWorld& world, const std::filesystem::path& dir);

}  // namespace unicap

#endif  // UNICAP_HARNESS_SYNTHETIC_WORLD_H_
