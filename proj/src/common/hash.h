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

#ifndef UNICAP_COMMON_HASH_H_
#define UNICAP_COMMON_HASH_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace unicap {

// SHA-1 of "blob <size>\0<content>", i.e. the id git assigns to the file.
std::string GitBlobHash(std::string_view content);
std::string GitBlobHashFile(const std::filesystem::path& path);

}  // namespace unicap

#endif  // UNICAP_COMMON_HASH_H_
