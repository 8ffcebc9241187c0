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

#ifndef UNICAP_CONCEPT_LEXICON_CONCEPT_LEXICON_H_
#define UNICAP_CONCEPT_LEXICON_CONCEPT_LEXICON_H_

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace unicap {

// Sorted, duplicate-free set of concept ids such as "dog.n.01".
class ConceptSet {
 public:
  ConceptSet() = default;
  ConceptSet(std::initializer_list<std::string> ids);
  explicit ConceptSet(std::vector<std::string> ids);

  void Insert(std::string id);
  bool Contains(std::string_view id) const;
  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::vector<std::string>& ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  size_t IntersectionSize(const ConceptSet& other) const;
  ConceptSet Union(const ConceptSet& other) const;
  bool IsSubsetOf(const ConceptSet& other) const;

  // Comma-joined ids, e.g. "ball.n.01,dog.n.01".
  std::string ToString() const;

  friend bool operator==(const ConceptSet&, const ConceptSet&) = default;

 private:
  std::vector<std::string> ids_;
};

struct LexiconOptions {
  // Retry an unknown token without its trailing 's'.
  bool strip_plural = false;
};

// Maps word tokens (and underscore-joined bigrams) to visual concepts and
// records kind-of relations between concepts. Immutable once loaded.
//
// File format, one record per tab-separated line:
//   surface<TAB>concept_id
//   !hypo<TAB>child_id<TAB>parent_id
// Lines starting with '#' and blank lines are ignored.
class ConceptLexicon {
 public:
  using Options = LexiconOptions;

  ConceptLexicon() = default;
  explicit ConceptLexicon(Options options) : options_(options) {}

  static ConceptLexicon Load(const std::filesystem::path& path, Options options = {});
  static ConceptLexicon Parse(std::istream& in, std::string_view source, Options options = {});

  // Adds a surface form. Throws ValidationError if it maps elsewhere already
  // or has more than two words.
  void AddSurface(std::string_view surface, std::string_view concept_id);
  // Declares child as a kind of parent; both become concepts.
  void AddHyponym(std::string_view child, std::string_view parent);
  // Throws ValidationError naming a concept on a cycle, if any.
  void Validate() const;

  std::optional<std::string> Lookup(std::string_view surface) const;

  // Greedy left-to-right match; a bigram beats the unigram at its first token
  // and each token is consumed once.
  ConceptSet Extract(std::span<const std::string> tokens) const;
  // Same matching, concepts in order of mention (repeats kept).
  std::vector<std::string> ExtractSequence(std::span<const std::string> tokens) const;

  // Adds every transitive hyponym of each detected concept. Unknown concepts
  // are kept and reported through the warning log.
  ConceptSet ExpandHyponyms(const ConceptSet& detected) const;

  bool HasConcept(std::string_view id) const;
  // Index of a concept in concepts(), or -1.
  int ConceptIndex(std::string_view id) const;

  size_t concept_count() const { return concepts_.size(); }
  size_t surface_count() const { return entries_.size(); }
  // Sorted concept ids.
  const std::vector<std::string>& concepts() const { return concept_list_; }
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }
  // Direct hyponyms of each concept.
  const std::map<std::string, std::set<std::string>, std::less<>>& hyponyms() const {
    return hyponyms_;
  }
  const Options& options() const { return options_; }

  // Writes the canonical file form (entries sorted, then hyponym records).
  void Write(std::ostream& out) const;

 private:
  void AddConcept(std::string_view id);

  Options options_;
  std::map<std::string, std::string, std::less<>> entries_;
  std::map<std::string, std::set<std::string>, std::less<>> hyponyms_;
  std::set<std::string, std::less<>> concepts_;
  std::vector<std::string> concept_list_;
};

}  // namespace unicap

#endif  // UNICAP_CONCEPT_LEXICON_CONCEPT_LEXICON_H_
