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

#ifndef UNICAP_ALIGNMENT_ASSIGNMENT_GRAPH_H_
#define UNICAP_ALIGNMENT_ASSIGNMENT_GRAPH_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "common/rng.h"
#include "concept_lexicon/concept_lexicon.h"

namespace unicap {

// Weak image -> sentence assignments. Edge weight is the number of shared
// concepts; only edges with weight >= 1 are stored. p(j | i) = e_ij / sum_j e_ij.
class AssignmentGraph {
 public:
  struct Edge {
    uint32_t sentence;
    uint32_t weight;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  // Images with no edge are recorded in dropped() and logged.
  static AssignmentGraph Build(std::span<const ConceptSet> image_concepts,
                               std::span<const ConceptSet> sentence_concepts);
  // One unit-weight edge per (image, sentence) pair.
  static AssignmentGraph FromPairs(int image_count, int sentence_count,
                                   std::span<const std::pair<int, int>> pairs);

  // Text form: header "AGRAPH1<TAB>images<TAB>sentences", then per image with
  // edges "image<TAB>sentence:weight,...".
  void Save(const std::filesystem::path& path) const;
  static AssignmentGraph Load(const std::filesystem::path& path);

  int image_count() const { return static_cast<int>(rows_.size()); }
  int sentence_count() const { return sentence_count_; }
  std::span<const Edge> Edges(int image) const { return rows_[image]; }
  uint64_t RowSum(int image) const { return row_sum_[image]; }
  bool HasEdges(int image) const { return !rows_[image].empty(); }
  // Images with at least one edge, ascending.
  std::vector<int> ActiveImages() const;
  const std::vector<int>& dropped() const { return dropped_; }
  size_t edge_count() const;
  double Probability(int image, int sentence) const;

  // One draw from p(. | image); the image must have edges.
  int Sample(int image, Rng& rng) const;
  // K independent draws with replacement.
  std::vector<int> SampleK(int image, int k, Rng& rng) const;

  friend bool operator==(const AssignmentGraph& a, const AssignmentGraph& b) {
    return a.sentence_count_ == b.sentence_count_ && a.rows_ == b.rows_;
  }

 private:
  void Finish();

  int sentence_count_ = 0;
  std::vector<std::vector<Edge>> rows_;
  std::vector<uint64_t> row_sum_;
  // Cumulative weights per row for sampling.
  std::vector<std::vector<uint64_t>> cumulative_;
  std::vector<int> dropped_;
};

}  // namespace unicap

#endif  // UNICAP_ALIGNMENT_ASSIGNMENT_GRAPH_H_
