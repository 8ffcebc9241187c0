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

#include "evaluation/mixing.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "common/error.h"

namespace unicap {

MixingResult MixingScore(const nn::Matrix<float>& text, std::span<const int> text_labels,
                         const nn::Matrix<float>& images, std::span<const int> image_labels, int k) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (static_cast<int>(text_labels.size()) != text.rows() || static_cast<int>(image_labels.size()) != images.rows()) {
    throw ValidationError("label count does not match embedding count");
  }
  if (text.rows() > 0 && images.rows() > 0 && text.cols() != images.cols()) {
    throw ShapeError("text width " + std::to_string(text.cols()) + " vs image width " + std::to_string(images.cols()));
  }
  // (is_text, index) members per cluster.
  std::map<int, std::vector<std::pair<int, int>>> clusters;
  for (int i = 0; i < images.rows(); ++i)
    if (image_labels[i] >= 0) clusters[image_labels[i]].push_back({0, i});
  for (int i = 0; i < text.rows(); ++i)
    if (text_labels[i] >= 0) clusters[text_labels[i]].push_back({1, i});

  MixingResult r;
  double sum = 0;
  auto row = [&](const std::pair<int, int>& m) { return m.first ? text.row(m.second) : images.row(m.second); };
  for (const auto& [label, members] : clusters) {
    if (static_cast<int>(members.size()) < k + 1) {
      ++r.clusters_skipped;
      continue;
    }
    std::vector<std::tuple<double, int, int>> d;
    for (const auto& q : members) {
      if (q.first) continue;
      const auto a = row(q);
      d.clear();
      for (const auto& m : members) {
        if (m == q) continue;
        const auto b = row(m);
        double s = 0;
        for (size_t t = 0; t < a.size(); ++t) {
          const double diff = static_cast<double>(a[t]) - b[t];
          s += diff * diff;
        }
        d.emplace_back(s, m.first, m.second);
      }
      std::partial_sort(d.begin(), d.begin() + k, d.end());
      int texts = 0;
      for (int n = 0; n < k; ++n) texts += std::get<1>(d[n]);
      sum += static_cast<double>(texts) / k;
      ++r.images_scored;
    }
  }
  r.score = r.images_scored ? sum / r.images_scored : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace unicap
