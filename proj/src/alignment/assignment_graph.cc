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

#include "alignment/assignment_graph.h"

#include <algorithm>
#include <fstream>
#include <map>

#include "common/error.h"
#include "common/log.h"
#include "common/strings.h"
#include "text_corpus/corpus.h"

namespace unicap {

AssignmentGraph AssignmentGraph::Build(std::span<const ConceptSet> image_concepts,
                                       std::span<const ConceptSet> sentence_concepts) {
  // Inverted index concept -> sentences.
  std::map<std::string, std::vector<uint32_t>, std::less<>> postings;
  for (size_t j = 0; j < sentence_concepts.size(); ++j) {
    for (const auto& c : sentence_concepts[j]) postings[c].push_back(static_cast<uint32_t>(j));
  }
  AssignmentGraph g;
  g.sentence_count_ = static_cast<int>(sentence_concepts.size());
  g.rows_.resize(image_concepts.size());
  std::vector<uint32_t> overlap(sentence_concepts.size(), 0);
  std::vector<uint32_t> touched;
  for (size_t i = 0; i < image_concepts.size(); ++i) {
    for (const auto& c : image_concepts[i]) {
      auto it = postings.find(c);
      if (it == postings.end()) continue;
      for (uint32_t j : it->second) {
        if (overlap[j]++ == 0) touched.push_back(j);
      }
    }
    std::sort(touched.begin(), touched.end());
    auto& row = g.rows_[i];
    row.reserve(touched.size());
    for (uint32_t j : touched) {
      row.push_back({j, overlap[j]});
      overlap[j] = 0;
    }
    touched.clear();
  }
  g.Finish();
  if (!g.dropped_.empty()) {
    LogWarning(std::to_string(g.dropped_.size()) + " of " + std::to_string(image_concepts.size()) +
               " images share no concept with any sentence and are dropped");
  }
  return g;
}

AssignmentGraph AssignmentGraph::FromPairs(int image_count, int sentence_count,
                                           std::span<const std::pair<int, int>> pairs) {
  AssignmentGraph g;
  g.sentence_count_ = sentence_count;
  g.rows_.resize(image_count);
  for (const auto& [i, j] : pairs) {
    if (i < 0 || i >= image_count || j < 0 || j >= sentence_count) {
      throw ValidationError("pair (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
    }
    g.rows_[i].push_back({static_cast<uint32_t>(j), 1});
  }
  for (auto& row : g.rows_) {
    std::sort(row.begin(), row.end(), [](const Edge& a, const Edge& b) { return a.sentence < b.sentence; });
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  g.Finish();
  return g;
}

void AssignmentGraph::Finish() {
  row_sum_.assign(rows_.size(), 0);
  cumulative_.assign(rows_.size(), {});
  dropped_.clear();
  for (size_t i = 0; i < rows_.size(); ++i) {
    uint64_t sum = 0;
    for (const auto& e : rows_[i]) {
      sum += e.weight;
      cumulative_[i].push_back(sum);
    }
    row_sum_[i] = sum;
    if (rows_[i].empty()) dropped_.push_back(static_cast<int>(i));
  }
}

std::vector<int> AssignmentGraph::ActiveImages() const {
  std::vector<int> out;
  for (int i = 0; i < image_count(); ++i)
    if (HasEdges(i)) out.push_back(i);
  return out;
}

size_t AssignmentGraph::edge_count() const {
  size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

double AssignmentGraph::Probability(int image, int sentence) const {
  const auto& row = rows_[image];
  auto it = std::lower_bound(row.begin(), row.end(), static_cast<uint32_t>(sentence),
                             [](const Edge& e, uint32_t s) { return e.sentence < s; });
  if (it == row.end() || it->sentence != static_cast<uint32_t>(sentence)) return 0.0;
  return static_cast<double>(it->weight) / static_cast<double>(row_sum_[image]);
}

int AssignmentGraph::Sample(int image, Rng& rng) const {
  if (rows_[image].empty()) throw ValidationError("image " + std::to_string(image) + " has no edges");
  const uint64_t r = rng.UniformIndex(row_sum_[image]);
  const auto& cum = cumulative_[image];
  const size_t k = std::upper_bound(cum.begin(), cum.end(), r) - cum.begin();
  return static_cast<int>(rows_[image][k].sentence);
}

std::vector<int> AssignmentGraph::SampleK(int image, int k, Rng& rng) const {
  std::vector<int> out(k);
  for (int t = 0; t < k; ++t) out[t] = Sample(image, rng);
  return out;
}

void AssignmentGraph::Save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "AGRAPH1\t" << image_count() << '\t' << sentence_count_ << '\n';
  for (int i = 0; i < image_count(); ++i) {
    if (rows_[i].empty()) continue;
    out << i << '\t';
    for (size_t k = 0; k < rows_[i].size(); ++k) {
      if (k) out << ',';
      out << rows_[i][k].sentence << ':' << rows_[i][k].weight;
    }
    out << '\n';
  }
}

AssignmentGraph AssignmentGraph::Load(const std::filesystem::path& path) {
  const auto lines = ReadLines(path);
  auto fail = [&](size_t line, const std::string& why) {
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + why);
  };
  auto parse_int = [&](std::string_view s, size_t line) {
    try {
      size_t used = 0;
      const long v = std::stol(std::string(s), &used);
      if (used != s.size() || v < 0) fail(line, "bad number '" + std::string(s) + "'");
      return v;
    } catch (const std::logic_error&) {
      fail(line, "bad number '" + std::string(s) + "'");
    }
    return 0L;
  };
  if (lines.empty()) fail(1, "empty graph file");
  const auto header = Split(lines[0], '\t');
  if (header.size() != 3 || header[0] != "AGRAPH1") fail(1, "missing AGRAPH1 header");
  AssignmentGraph g;
  g.rows_.resize(parse_int(header[1], 1));
  g.sentence_count_ = static_cast<int>(parse_int(header[2], 1));
  for (size_t n = 1; n < lines.size(); ++n) {
    if (Trim(lines[n]).empty()) continue;
    const auto fields = Split(lines[n], '\t');
    if (fields.size() != 2) fail(n + 1, "expected image<TAB>edges");
    const long i = parse_int(fields[0], n + 1);
    if (i >= g.image_count()) fail(n + 1, "image index out of range");
    auto& row = g.rows_[i];
    for (const auto& item : Split(fields[1], ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) fail(n + 1, "expected sentence:weight");
      const long j = parse_int(item.substr(0, colon), n + 1);
      const long w = parse_int(item.substr(colon + 1), n + 1);
      if (j >= g.sentence_count_ || w < 1) fail(n + 1, "edge out of range");
      if (!row.empty() && row.back().sentence >= j) fail(n + 1, "edges must be sorted by sentence");
      row.push_back({static_cast<uint32_t>(j), static_cast<uint32_t>(w)});
    }
  }
  g.Finish();
  return g;
}

}  // namespace unicap
