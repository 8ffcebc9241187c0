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

#include "nn/checkpoint.h"

#include <fstream>

#include "common/binary_io.h"

namespace unicap::nn {
namespace {

constexpr std::string_view kMagic = "CKPT1";

}  // namespace

void SaveCheckpoint(const std::filesystem::path& path,
                    std::initializer_list<const ParameterStore<float>*> stores) {
  SaveCheckpoint(path, std::vector<const ParameterStore<float>*>(stores));
}

void SaveCheckpoint(const std::filesystem::path& path, const std::vector<const ParameterStore<float>*>& stores) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    binio::WriteBytes(out, kMagic);
    binio::WriteU32(out, kCheckpointVersion);
    for (const auto* store : stores) {
      for (const auto& b : store->blocks()) {
        binio::WriteU32(out, static_cast<uint32_t>(b.name.size()));
        binio::WriteBytes(out, b.name);
        binio::WriteU32(out, static_cast<uint32_t>(b.shape.size()));
        for (uint32_t d : b.shape) binio::WriteU32(out, d);
        for (float v : b.value) binio::WriteF32(out, v);
      }
    }
    if (!out.flush()) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ParameterStore<float> LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  binio::ExpectMagic(in, kMagic, path.string());
  const uint32_t version = binio::ReadU32(in);
  if (version != kCheckpointVersion) {
    throw ValidationError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  ParameterStore<float> store;
  while (in.peek() != std::char_traits<char>::eof()) {
    const uint32_t name_len = binio::ReadU32(in);
    std::string name = binio::ReadBytes(in, name_len);
    const uint32_t rank = binio::ReadU32(in);
    std::vector<uint32_t> shape(rank);
    for (auto& d : shape) d = binio::ReadU32(in);
    auto& b = store.Add(name, shape);
    for (auto& v : b.value) v = binio::ReadF32(in);
  }
  return store;
}

}  // namespace unicap::nn
