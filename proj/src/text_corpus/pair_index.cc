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

#include "text_corpus/pair_index.h"

#include <algorithm>
#include <fstream>
#include <map>

#include "common/binary_io.h"
#include "common/error.h"

namespace unicap {
namespace {

constexpr std::string_view kMagic = "PIDX1";
constexpr int kMaxRejections = 64;

}  // namespace

PairIndex PairIndex::Build(std::span<const ConceptSet> sentence_concepts) {
  PairIndex index;
  std::map<std::string, uint32_t> ids;
  for (const auto& set : sentence_concepts) {
    for (const auto& c : set) ids.emplace(c, 0);
  }
  uint32_t next = 0;
  for (auto& [name, id] : ids) {
    id = next++;
    index.concepts_.push_back(name);
  }
  index.sentence_concepts_.reserve(sentence_concepts.size());
  for (const auto& set : sentence_concepts) {
    std::vector<uint32_t> row;
    for (const auto& c : set) row.push_back(ids.at(c));
    index.sentence_concepts_.push_back(std::move(row));
  }
  index.Finish();
  return index;
}

// Rebuilds postings, positives and negative counts from sentence_concepts_.
void PairIndex::Finish() {
  const size_t n = sentence_concepts_.size();
  postings_.assign(concepts_.size(), {});
  for (size_t j = 0; j < n; ++j) {
    for (uint32_t c : sentence_concepts_[j]) postings_[c].push_back(static_cast<uint32_t>(j));
  }
  positives_.assign(n, {});
  positive_weight_.assign(n, 0);
  negative_count_.assign(n, 0);
  std::vector<uint32_t> overlap(n, 0);
  std::vector<uint32_t> touched;
  for (size_t j = 0; j < n; ++j) {
    touched.clear();
    for (uint32_t c : sentence_concepts_[j]) {
      for (uint32_t k : postings_[c]) {
        if (overlap[k]++ == 0) touched.push_back(k);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (uint32_t k : touched) {
      if (k != j && overlap[k] >= 2) {
        positives_[j].push_back({k, overlap[k]});
        positive_weight_[j] += overlap[k];
      }
    }
    // Everything untouched has zero overlap; j itself is never a negative.
    const bool self_touched = !sentence_concepts_[j].empty();
    negative_count_[j] = static_cast<uint32_t>(n - touched.size() - (self_touched ? 0 : 1));
    for (uint32_t k : touched) overlap[k] = 0;
  }
}

uint32_t PairIndex::Overlap(int j, int k) const {
  const auto& a = sentence_concepts_[j];
  const auto& b = sentence_concepts_[k];
  uint32_t count = 0;
  size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x] < b[y]) {
      ++x;
    } else if (b[y] < a[x]) {
      ++y;
    } else {
      ++count;
      ++x;
      ++y;
    }
  }
  return count;
}

std::vector<int> PairIndex::Negatives(int j) const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(sentence_count()); ++k) {
    if (IsNegative(j, k)) out.push_back(k);
  }
  return out;
}

void PairIndex::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  binio::WriteBytes(out, kMagic);
  binio::WriteU32(out, static_cast<uint32_t>(sentence_concepts_.size()));
  binio::WriteU32(out, static_cast<uint32_t>(concepts_.size()));
  for (const auto& c : concepts_) {
    binio::WriteU32(out, static_cast<uint32_t>(c.size()));
    binio::WriteBytes(out, c);
  }
  for (size_t j = 0; j < sentence_concepts_.size(); ++j) {
    binio::WriteU32(out, static_cast<uint32_t>(sentence_concepts_[j].size()));
    for (uint32_t c : sentence_concepts_[j]) binio::WriteU32(out, c);
    binio::WriteU32(out, static_cast<uint32_t>(positives_[j].size()));
    for (const auto& p : positives_[j]) {
      binio::WriteU32(out, p.sentence);
      binio::WriteU32(out, p.overlap);
    }
    binio::WriteU32(out, negative_count_[j]);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

PairIndex PairIndex::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  binio::ExpectMagic(in, kMagic, path.string());
  const uint32_t n = binio::ReadU32(in);
  const uint32_t nc = binio::ReadU32(in);
  PairIndex index;
  for (uint32_t i = 0; i < nc; ++i) index.concepts_.push_back(binio::ReadBytes(in, binio::ReadU32(in)));
  std::vector<std::vector<Positive>> stored_pos(n);
  std::vector<uint32_t> stored_neg(n);
  index.sentence_concepts_.resize(n);
  for (uint32_t j = 0; j < n; ++j) {
    const uint32_t k = binio::ReadU32(in);
    for (uint32_t i = 0; i < k; ++i) {
      const uint32_t c = binio::ReadU32(in);
      if (c >= nc) throw ValidationError(path.string() + ": concept index out of range");
      index.sentence_concepts_[j].push_back(c);
    }
    const uint32_t np = binio::ReadU32(in);
    for (uint32_t i = 0; i < np; ++i) {
      const uint32_t s = binio::ReadU32(in);
      const uint32_t o = binio::ReadU32(in);
      stored_pos[j].push_back({s, o});
    }
    stored_neg[j] = binio::ReadU32(in);
  }
  index.Finish();
  if (index.positives_ != stored_pos || index.negative_count_ != stored_neg) {
    throw ValidationError(path.string() + ": posting lists inconsistent with concept lists");
  }
  return index;
}

std::optional<TripletSample> SampleTriplet(int anchor, const PairIndex& index, Rng& rng) {
  if (!index.TripletEligible(anchor)) return std::nullopt;
  TripletSample t;
  t.anchor = anchor;

  const auto positives = index.Positives(anchor);
  size_t r = rng.UniformIndex(index.PositiveWeight(anchor));
  for (const auto& p : positives) {
    if (r < p.overlap) {
      t.positive = static_cast<int>(p.sentence);
      break;
    }
    r -= p.overlap;
  }

  const size_t n = index.sentence_count();
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const int k = static_cast<int>(rng.UniformIndex(n));
    if (index.IsNegative(anchor, k)) {
      t.negative = k;
      return t;
    }
  }
  // Negatives are a small minority; draw from the explicit list instead.
  const auto negatives = index.Negatives(anchor);
  t.negative = negatives[rng.UniformIndex(negatives.size())];
  return t;
}

}  // namespace unicap
