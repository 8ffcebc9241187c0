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

#include "text_corpus/vocabulary.h"

#include <algorithm>
#include <fstream>

#include "common/error.h"

namespace unicap {
namespace {

constexpr const char* kReserved[] = {"<pad>", "<bos>", "<eos>", "<unk>"};

}  // namespace

Vocabulary::Vocabulary() {
  for (const char* t : kReserved) Append(t);
}

void Vocabulary::Append(std::string token) {
  const int id = static_cast<int>(tokens_.size());
  if (!index_.emplace(token, id).second) {
    throw ValidationError("duplicate vocabulary token '" + token + "'");
  }
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::FromCounts(const std::map<std::string, int64_t>& counts, int min_count) {
  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto& [token, n] : counts) {
    if (n >= min_count && !std::count(std::begin(kReserved), std::end(kReserved), token)) {
      kept.emplace_back(token, n);
    }
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (auto& [token, n] : kept) v.Append(token);
  return v;
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() < kNumReserved) throw ValidationError(path.string() + ": truncated vocabulary");
  for (int i = 0; i < kNumReserved; ++i) {
    if (lines[i] != kReserved[i]) {
      throw ValidationError(path.string() + ": reserved token " + std::to_string(i) + " missing");
    }
  }
  Vocabulary v;
  for (size_t i = kNumReserved; i < lines.size(); ++i) v.Append(lines[i]);
  return v;
}

void Vocabulary::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

int Vocabulary::Id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::Token(int id) const {
  if (id < 0 || id >= size()) throw ValidationError("token id out of range: " + std::to_string(id));
  return tokens_[id];
}

bool Vocabulary::Contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

std::string Vocabulary::Decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    if (id == kPad || id == kBos || id == kEos) continue;
    if (!out.empty()) out += ' ';
    out += Token(id);
  }
  return out;
}

}  // namespace unicap
