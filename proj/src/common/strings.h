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

#ifndef UNICAP_COMMON_STRINGS_H_
#define UNICAP_COMMON_STRINGS_H_

#include <string>
#include <string_view>
#include <vector>

namespace unicap {

std::vector<std::string> Split(std::string_view s, char delim);
std::string_view Trim(std::string_view s);
std::string ToLower(std::string_view s);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);
bool StartsWith(std::string_view s, std::string_view prefix);

// Shortest decimal form that round-trips.
std::string FormatDouble(double v);

}  // namespace unicap

#endif  // UNICAP_COMMON_STRINGS_H_
