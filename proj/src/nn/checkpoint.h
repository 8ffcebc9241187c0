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

#ifndef UNICAP_NN_CHECKPOINT_H_
#define UNICAP_NN_CHECKPOINT_H_

#include <filesystem>
#include <initializer_list>
#include <vector>

#include "nn/parameter_store.h"

namespace unicap::nn {

// "CKPT1", u32 version, then until end of file, per block: u32 name length,
// UTF-8 name, u32 rank, u32 dims, float32 values; all little-endian.
inline constexpr uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const std::filesystem::path& path,
                    std::initializer_list<const ParameterStore<float>*> stores);
void SaveCheckpoint(const std::filesystem::path& path, const std::vector<const ParameterStore<float>*>& stores);
ParameterStore<float> LoadCheckpoint(const std::filesystem::path& path);

}  // namespace unicap::nn

#endif  // UNICAP_NN_CHECKPOINT_H_
