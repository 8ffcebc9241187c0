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

#ifndef UNICAP_EVALUATION_MIXING_H_
#define UNICAP_EVALUATION_MIXING_H_

#include <span>

#include "nn/matrix.h"

namespace unicap {

struct MixingResult {
  double score = 0;  // NaN when no image embedding was scored
  int images_scored = 0;
  int clusters_skipped = 0;  // fewer than k + 1 members
};

// For each image embedding, the fraction of its k nearest neighbours (L2,
// same cluster, itself excluded) that are text embeddings; averaged over
// images. Negative labels are ignored. Distance ties go to images before
// texts, then lower index.
MixingResult MixingScore(const nn::Matrix<float>& text, std::span<const int> text_labels,
                         const nn::Matrix<float>& images, std::span<const int> image_labels, int k = 10);

}  // namespace unicap

#endif  // UNICAP_EVALUATION_MIXING_H_
