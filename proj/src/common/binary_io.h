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

#ifndef UNICAP_COMMON_BINARY_IO_H_
#define UNICAP_COMMON_BINARY_IO_H_

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "common/error.h"

namespace unicap::binio {

inline void WriteU32(std::ostream& out, uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff),
                                 static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

inline void WriteF32(std::ostream& out, float v) { WriteU32(out, std::bit_cast<uint32_t>(v)); }

inline void WriteBytes(std::ostream& out, std::string_view bytes) {
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline uint32_t ReadU32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw ValidationError("unexpected end of binary stream");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline float ReadF32(std::istream& in) { return std::bit_cast<float>(ReadU32(in)); }

inline std::string ReadBytes(std::istream& in, size_t n) {
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw ValidationError("unexpected end of binary stream");
  return s;
}

// Reads and checks a fixed magic prefix.
inline void ExpectMagic(std::istream& in, std::string_view magic, std::string_view what) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || got != magic) {
    throw ValidationError(std::string(what) + ": bad magic, expected \"" + std::string(magic) + "\"");
  }
}

}  // namespace unicap::binio

#endif  // UNICAP_COMMON_BINARY_IO_H_
