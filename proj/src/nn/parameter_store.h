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

#ifndef UNICAP_NN_PARAMETER_STORE_H_
#define UNICAP_NN_PARAMETER_STORE_H_

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "common/error.h"
#include "common/rng.h"

namespace unicap::nn {

template <typename T>
struct ParamBlock {
  std::string name;
  std::vector<uint32_t> shape;
  std::vector<T> value;
  std::vector<T> grad;

  size_t size() const { return value.size(); }
  std::string ShapeString() const {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
      if (i) s += " x ";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }
};

// Named, shaped parameter blocks with gradient buffers. Blocks live in a
// deque, so references handed out by Add/Get stay valid while the store
// grows and when the store is moved.
template <typename T>
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;

  ParamBlock<T>& Add(const std::string& name, std::vector<uint32_t> shape) {
    if (index_.contains(name)) throw ValidationError("duplicate parameter block " + name);
    size_t n = 1;
    for (uint32_t d : shape) n *= d;
    ParamBlock<T>& b = blocks_.emplace_back();
    b.name = name;
    b.shape = std::move(shape);
    b.value.assign(n, T(0));
    b.grad.assign(n, T(0));
    index_.emplace(name, blocks_.size() - 1);
    return b;
  }

  bool Has(std::string_view name) const { return index_.find(name) != index_.end(); }

  ParamBlock<T>& Get(std::string_view name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("missing parameter block " + std::string(name));
    return blocks_[it->second];
  }
  const ParamBlock<T>& Get(std::string_view name) const {
    return const_cast<ParameterStore*>(this)->Get(name);
  }

  std::deque<ParamBlock<T>>& blocks() { return blocks_; }
  const std::deque<ParamBlock<T>>& blocks() const { return blocks_; }

  void ZeroGrad() {
    for (auto& b : blocks_) std::fill(b.grad.begin(), b.grad.end(), T(0));
  }

  size_t ParameterCount() const {
    size_t n = 0;
    for (const auto& b : blocks_) n += b.size();
    return n;
  }

  double GradNorm() const {
    double s = 0;
    for (const auto& b : blocks_)
      for (T g : b.grad) s += static_cast<double>(g) * g;
    return std::sqrt(s);
  }

  bool AllFinite() const {
    for (const auto& b : blocks_)
      for (T v : b.value)
        if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  template <typename U>
  ParameterStore<U> Cast() const {
    ParameterStore<U> out;
    for (const auto& b : blocks_) {
      auto& nb = out.Add(b.name, b.shape);
      for (size_t i = 0; i < b.size(); ++i) nb.value[i] = static_cast<U>(b.value[i]);
    }
    return out;
  }

  ParameterStore Clone() const { return Cast<T>(); }

  // Copies of the blocks whose names start with prefix.
  ParameterStore Extract(std::string_view prefix) const {
    ParameterStore out;
    for (const auto& b : blocks_) {
      if (b.name.compare(0, prefix.size(), prefix) == 0) out.Add(b.name, b.shape).value = b.value;
    }
    return out;
  }

 private:
  std::deque<ParamBlock<T>> blocks_;
  std::map<std::string, size_t, std::less<>> index_;
};

// uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
template <typename T>
void GlorotUniform(ParamBlock<T>& block, int fan_in, int fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  for (T& v : block.value) v = static_cast<T>(rng.Uniform(-a, a));
}

template <typename T>
void UniformInit(ParamBlock<T>& block, double a, Rng& rng) {
  for (T& v : block.value) v = static_cast<T>(rng.Uniform(-a, a));
}

}  // namespace unicap::nn

#endif  // UNICAP_NN_PARAMETER_STORE_H_
