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

#ifndef UNICAP_NN_GRADIENT_CHECK_H_
#define UNICAP_NN_GRADIENT_CHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "nn/parameter_store.h"

namespace unicap::nn {

struct GradientCheckOptions {
  double delta = 1e-5;
  double tolerance = 1e-4;
  // Relative error is |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  // 2: (f(x+h) - f(x-h)) / 2h. 4: the fourth-order central stencil
  // (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h, which tolerates a larger
  // h and so loses less to roundoff on losses with large magnitude.
  int stencil = 2;
};

struct BlockGradientCheck {
  std::string name;
  double max_rel_error = 0;
  double max_abs_error = 0;
  size_t worst_index = 0;
  double analytic_at_worst = 0;
  double numeric_at_worst = 0;
};

struct GradientCheckReport {
  std::vector<BlockGradientCheck> blocks;
  double max_rel_error = 0;
  bool passed = true;
  std::vector<std::string> failures;

  std::string Summary() const;
};

// Compares analytic gradients against central differences for every element
// of every block. `loss(true)` must return the loss and accumulate gradients
// into the store; `loss(false)` only returns the loss.
GradientCheckReport CheckGradients(ParameterStore<double>& store,
                                   const std::function<double(bool)>& loss,
                                   const GradientCheckOptions& options = {});

}  // namespace unicap::nn

#endif  // UNICAP_NN_GRADIENT_CHECK_H_
