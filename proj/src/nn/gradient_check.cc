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

#include "nn/gradient_check.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "common/error.h"

namespace unicap::nn {

std::string GradientCheckReport::Summary() const {
  std::ostringstream out;
  out << (passed ? "PASS" : "FAIL") << " max_rel_error=" << max_rel_error;
  for (const auto& b : blocks) {
    out << "\n  " << b.name << ": rel=" << b.max_rel_error << " abs=" << b.max_abs_error;
  }
  for (const auto& f : failures) out << "\n  ! " << f;
  return out.str();
}

GradientCheckReport CheckGradients(ParameterStore<double>& store,
                                   const std::function<double(bool)>& loss,
                                   const GradientCheckOptions& options) {
  if (options.stencil != 2 && options.stencil != 4) {
    throw ValidationError("gradient check stencil must be 2 or 4");
  }
  store.ZeroGrad();
  loss(true);
  std::vector<std::vector<double>> analytic;
  for (const auto& b : store.blocks()) analytic.push_back(b.grad);
  store.ZeroGrad();

  GradientCheckReport report;
  size_t bi = 0;
  for (auto& b : store.blocks()) {
    BlockGradientCheck check;
    check.name = b.name;
    for (size_t i = 0; i < b.size(); ++i) {
      const double saved = b.value[i];
      auto at = [&](double offset) {
        b.value[i] = saved + offset;
        return loss(false);
      };
      const double h = options.delta;
      double numeric;
      if (options.stencil == 4) {
        numeric = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
      } else {
        numeric = (at(h) - at(-h)) / (2 * h);
      }
      b.value[i] = saved;
      const double a = analytic[bi][i];
      const double abs_err = std::abs(a - numeric);
      const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), options.floor});
      check.max_abs_error = std::max(check.max_abs_error, abs_err);
      if (rel > check.max_rel_error) {
        check.max_rel_error = rel;
        check.worst_index = i;
        check.analytic_at_worst = a;
        check.numeric_at_worst = numeric;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    if (check.max_rel_error > options.tolerance) {
      report.passed = false;
      std::ostringstream msg;
      msg << b.name << "[" << check.worst_index << "]: analytic " << check.analytic_at_worst
          << " numeric " << check.numeric_at_worst << " rel " << check.max_rel_error;
      report.failures.push_back(msg.str());
    }
    report.blocks.push_back(std::move(check));
    ++bi;
  }
  return report;
}

}  // namespace unicap::nn
