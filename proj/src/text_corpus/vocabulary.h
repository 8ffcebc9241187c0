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

#ifndef UNICAP_TEXT_CORPUS_VOCABULARY_H_
#define UNICAP_TEXT_CORPUS_VOCABULARY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace unicap {

// Dense token ids. Ids 0..3 are reserved for pad, bos, eos and unk.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kNumReserved = 4;

  Vocabulary();

  // Keeps tokens with count >= min_count, ordered by descending count then
  // lexicographically.
  static Vocabulary FromCounts(const std::map<std::string, int64_t>& counts, int min_count);

  static Vocabulary Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;

  int Id(std::string_view token) const;  // kUnk when absent
  const std::string& Token(int id) const;
  bool Contains(std::string_view token) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Joins ids into text, skipping reserved ids other than unk.
  std::string Decode(const std::vector<int>& ids) const;

 private:
  void Append(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace unicap

#endif  // UNICAP_TEXT_CORPUS_VOCABULARY_H_
