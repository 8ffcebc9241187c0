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

#ifndef UNICAP_TESTS_GRADIENT_SUITE_H_
#define UNICAP_TESTS_GRADIENT_SUITE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nn/gradient_check.h"

namespace unicap::testing {

struct GradientCase {
  std::string name;
  nn::GradientCheckReport report;
};

// Finite-difference checks of every op and composite loss on tiny models
// (embedding width 8), for one seed.
std::vector<GradientCase> RunGradientSuite(uint64_t seed);

}  // namespace unicap::testing

#endif  // UNICAP_TESTS_GRADIENT_SUITE_H_
