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

#ifndef UNICAP_TEXT_CORPUS_PAIR_INDEX_H_
#define UNICAP_TEXT_CORPUS_PAIR_INDEX_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common/rng.h"
#include "concept_lexicon/concept_lexicon.h"

namespace unicap {

struct TripletSample {
  int anchor = 0;
  int positive = 0;
  int negative = 0;
};

// Positive and negative sentence pairs for the concept triplet loss.
//
// Sentence k is a positive of j when k != j and they share at least two
// concepts; a negative when they share none. Pairs sharing exactly one
// concept are neither. Negatives are not materialized: membership is decided
// by intersecting concept lists, and sampling uses rejection.
class PairIndex {
 public:
  struct Positive {
    uint32_t sentence;
    uint32_t overlap;
    friend bool operator==(const Positive&, const Positive&) = default;
  };

  static PairIndex Build(std::span<const ConceptSet> sentence_concepts);

  // Binary form: "PIDX1", then little-endian u32 fields.
  void Save(const std::filesystem::path& path) const;
  static PairIndex Load(const std::filesystem::path& path);

  size_t sentence_count() const { return sentence_concepts_.size(); }
  const std::vector<std::string>& concepts() const { return concepts_; }

  std::span<const Positive> Positives(int j) const { return positives_[j]; }
  uint32_t PositiveWeight(int j) const { return positive_weight_[j]; }
  uint32_t NegativeCount(int j) const { return negative_count_[j]; }
  bool IsNegative(int j, int k) const { return j != k && Overlap(j, k) == 0; }
  uint32_t Overlap(int j, int k) const;
  // Both sets nonempty.
  bool TripletEligible(int j) const { return !positives_[j].empty() && negative_count_[j] > 0; }

  // Sentences with zero overlap, materialized. O(n); tests and fallbacks only.
  std::vector<int> Negatives(int j) const;

  friend bool operator==(const PairIndex&, const PairIndex&) = default;

 private:
  void Finish();

  std::vector<std::string> concepts_;
  std::vector<std::vector<uint32_t>> sentence_concepts_;
  std::vector<std::vector<uint32_t>> postings_;
  std::vector<std::vector<Positive>> positives_;
  std::vector<uint32_t> positive_weight_;
  std::vector<uint32_t> negative_count_;
};

// Draws a positive with probability overlap / sum(overlaps) and a negative
// uniformly. Returns nullopt when either set is empty; the caller then skips
// the triplet term for this anchor.
std::optional<TripletSample> SampleTriplet(int anchor, const PairIndex& index, Rng& rng);

}  // namespace unicap

#endif  // UNICAP_TEXT_CORPUS_PAIR_INDEX_H_
