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

#ifndef UNICAP_NN_ADAM_H_
#define UNICAP_NN_ADAM_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "nn/parameter_store.h"

namespace unicap::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over every block of one store. Moments are kept in
// double regardless of the parameter type.
template <typename T>
class Adam {
 public:
  Adam(ParameterStore<T>& store, AdamOptions options) : store_(&store), options_(options) {
    for (const auto& b : store.blocks()) {
      m_.emplace_back(b.size(), 0.0);
      v_.emplace_back(b.size(), 0.0);
    }
  }

  // Applies one update from the accumulated gradients, then zeroes them.
  void Step() {
    ++t_;
    const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
    size_t bi = 0;
    for (auto& b : store_->blocks()) {
      auto& m = m_[bi];
      auto& v = v_[bi];
      for (size_t i = 0; i < b.size(); ++i) {
        const double g = static_cast<double>(b.grad[i]);
        m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * g;
        v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * g * g;
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        b.value[i] = static_cast<T>(static_cast<double>(b.value[i]) -
                                    options_.lr * mhat / (std::sqrt(vhat) + options_.eps));
        b.grad[i] = T(0);
      }
      ++bi;
    }
  }

  int64_t step_count() const { return t_; }
  const AdamOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }
  const std::vector<double>& first_moment(size_t block) const { return m_[block]; }
  const std::vector<double>& second_moment(size_t block) const { return v_[block]; }

 private:
  ParameterStore<T>* store_;
  AdamOptions options_;
  std::vector<std::vector<double>> m_, v_;
  int64_t t_ = 0;
};

}  // namespace unicap::nn

#endif  // UNICAP_NN_ADAM_H_
