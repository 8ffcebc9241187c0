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

#include "concept_lexicon/concept_lexicon.h"

#include <algorithm>
#include <fstream>

#include "common/error.h"
#include "common/log.h"
#include "common/strings.h"

namespace unicap {

ConceptSet::ConceptSet(std::initializer_list<std::string> ids)
    : ConceptSet(std::vector<std::string>(ids)) {}

ConceptSet::ConceptSet(std::vector<std::string> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

void ConceptSet::Insert(std::string id) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it != ids_.end() && *it == id) return;
  ids_.insert(it, std::move(id));
}

bool ConceptSet::Contains(std::string_view id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  return it != ids_.end() && *it == id;
}

size_t ConceptSet::IntersectionSize(const ConceptSet& other) const {
  size_t n = 0;
  auto a = ids_.begin();
  auto b = other.ids_.begin();
  while (a != ids_.end() && b != other.ids_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++n;
      ++a;
      ++b;
    }
  }
  return n;
}

ConceptSet ConceptSet::Union(const ConceptSet& other) const {
  std::vector<std::string> out;
  std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                 std::back_inserter(out));
  ConceptSet s;
  s.ids_ = std::move(out);
  return s;
}

bool ConceptSet::IsSubsetOf(const ConceptSet& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

std::string ConceptSet::ToString() const { return Join(ids_, ","); }

ConceptLexicon ConceptLexicon::Load(const std::filesystem::path& path, Options options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon " + path.string());
  return Parse(in, path.string(), options);
}

ConceptLexicon ConceptLexicon::Parse(std::istream& in, std::string_view source, Options options) {
  ConceptLexicon lex(options);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    const auto fields = Split(line, '\t');
    auto fail = [&](const std::string& why) {
      throw ValidationError(std::string(source) + ":" + std::to_string(line_no) + ": " + why);
    };
    try {
      if (fields[0] == "!hypo") {
        if (fields.size() != 3) fail("hyponym record needs 3 fields");
        const auto child = Trim(fields[1]);
        const auto parent = Trim(fields[2]);
        if (child.empty() || parent.empty()) fail("empty concept id");
        lex.AddHyponym(child, parent);
      } else {
        if (fields.size() != 2) fail("expected surface<TAB>concept_id");
        const auto surface = Trim(fields[0]);
        const auto concept_id = Trim(fields[1]);
        if (surface.empty() || concept_id.empty()) fail("empty field");
        lex.AddSurface(surface, concept_id);
      }
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (StartsWith(what, std::string(source) + ":")) throw;
      fail(what);
    }
  }
  lex.Validate();
  return lex;
}

void ConceptLexicon::AddConcept(std::string_view id) {
  if (!concepts_.emplace(id).second) return;
  auto pos = std::lower_bound(concept_list_.begin(), concept_list_.end(), id);
  concept_list_.insert(pos, std::string(id));
}

void ConceptLexicon::AddSurface(std::string_view surface, std::string_view concept_id) {
  const std::string key = ToLower(surface);
  if (std::count(key.begin(), key.end(), '_') > 1) {
    throw ValidationError("surface form '" + key + "' has more than two words");
  }
  if (key.front() == '_' || key.back() == '_') {
    throw ValidationError("malformed surface form '" + key + "'");
  }
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    if (it->second != concept_id) {
      throw ValidationError("surface form '" + key + "' maps to both " + it->second + " and " +
                            std::string(concept_id));
    }
    return;
  }
  entries_.emplace(key, std::string(concept_id));
  AddConcept(concept_id);
}

void ConceptLexicon::AddHyponym(std::string_view child, std::string_view parent) {
  AddConcept(child);
  AddConcept(parent);
  hyponyms_[std::string(parent)].emplace(child);
}

void ConceptLexicon::Validate() const {
  // Iterative three-color DFS over parent -> child edges.
  enum Color { kWhite, kGray, kBlack };
  std::map<std::string_view, Color> color;
  for (const auto& c : concepts_) color[c] = kWhite;
  for (const auto& root : concepts_) {
    if (color[root] != kWhite) continue;
    struct Frame {
      std::string_view node;
      std::set<std::string>::const_iterator next, end;
    };
    std::vector<Frame> stack;
    auto push = [&](std::string_view node) {
      color[node] = kGray;
      auto it = hyponyms_.find(node);
      if (it == hyponyms_.end()) {
        static const std::set<std::string> kEmpty;
        stack.push_back({node, kEmpty.begin(), kEmpty.end()});
      } else {
        stack.push_back({node, it->second.begin(), it->second.end()});
      }
    };
    push(root);
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.next == top.end) {
        color[top.node] = kBlack;
        stack.pop_back();
        continue;
      }
      const std::string& child = *top.next++;
      if (color[child] == kGray) {
        throw ValidationError("hyponym cycle through concept " + child);
      }
      if (color[child] == kWhite) push(child);
    }
  }
}

std::optional<std::string> ConceptLexicon::Lookup(std::string_view surface) const {
  auto it = entries_.find(surface);
  if (it != entries_.end()) return it->second;
  if (options_.strip_plural && surface.size() > 1 && surface.back() == 's') {
    it = entries_.find(surface.substr(0, surface.size() - 1));
    if (it != entries_.end()) return it->second;
  }
  return std::nullopt;
}

std::vector<std::string> ConceptLexicon::ExtractSequence(std::span<const std::string> tokens) const {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < tokens.size()) {
    if (i + 1 < tokens.size()) {
      if (auto hit = Lookup(tokens[i] + "_" + tokens[i + 1])) {
        out.push_back(std::move(*hit));
        i += 2;
        continue;
      }
    }
    if (auto hit = Lookup(tokens[i])) out.push_back(std::move(*hit));
    ++i;
  }
  return out;
}

ConceptSet ConceptLexicon::Extract(std::span<const std::string> tokens) const {
  return ConceptSet(ExtractSequence(tokens));
}

ConceptSet ConceptLexicon::ExpandHyponyms(const ConceptSet& detected) const {
  std::vector<std::string> result;
  std::set<std::string, std::less<>> seen;
  std::vector<std::string> frontier;
  for (const auto& c : detected) {
    if (!HasConcept(c)) {
      LogWarning("concept " + c + " is not in the lexicon; kept without expansion");
    }
    if (seen.insert(c).second) frontier.push_back(c);
  }
  while (!frontier.empty()) {
    const std::string node = std::move(frontier.back());
    frontier.pop_back();
    result.push_back(node);
    auto it = hyponyms_.find(node);
    if (it == hyponyms_.end()) continue;
    for (const auto& child : it->second) {
      if (seen.insert(child).second) frontier.push_back(child);
    }
  }
  return ConceptSet(std::move(result));
}

bool ConceptLexicon::HasConcept(std::string_view id) const { return concepts_.contains(id); }

int ConceptLexicon::ConceptIndex(std::string_view id) const {
  auto it = std::lower_bound(concept_list_.begin(), concept_list_.end(), id);
  if (it == concept_list_.end() || *it != id) return -1;
  return static_cast<int>(it - concept_list_.begin());
}

void ConceptLexicon::Write(std::ostream& out) const {
  for (const auto& [surface, id] : entries_) out << surface << '\t' << id << '\n';
  for (const auto& [parent, children] : hyponyms_) {
    for (const auto& child : children) out << "!hypo\t" << child << '\t' << parent << '\n';
  }
}

}  // namespace unicap
