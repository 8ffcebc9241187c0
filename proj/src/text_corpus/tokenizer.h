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

#ifndef UNICAP_TEXT_CORPUS_TOKENIZER_H_
#define UNICAP_TEXT_CORPUS_TOKENIZER_H_

#include <string>
#include <string_view>
#include <vector>

namespace unicap {

// Lowercases and splits on whitespace and ASCII punctuation. Apostrophes are
// kept when they sit between two token characters ("dog's"), dropped
// otherwise. Bytes >= 0x80 are treated as token characters.
std::vector<std::string> Tokenize(std::string_view text);

}  // namespace unicap

#endif  // UNICAP_TEXT_CORPUS_TOKENIZER_H_
