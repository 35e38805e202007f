// Copyright 2026 The densestereo Authors.
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


#include "densestereo/adagrad.h"

#include <cmath>
#include <string>

#include "densestereo/errors.h"

namespace densestereo {

Adagrad::Adagrad(double learning_rate, double epsilon)
    : learning_rate_(learning_rate), epsilon_(epsilon) {
  set_learning_rate(learning_rate);
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw InvalidParameter("Adagrad: epsilon must be positive");
  }
}

void Adagrad::set_learning_rate(double lr) {
  if (!(lr >= 0) || !std::isfinite(lr)) {
    throw InvalidParameter("Adagrad: learning rate must be finite and >= 0");
  }
  learning_rate_ = lr;
}

void Adagrad::step(std::span<double> params, std::span<const double> grads) {
  step(std::vector<std::span<double>>{params},
       std::vector<std::span<const double>>{grads});
}

void Adagrad::step(const std::vector<std::span<double>>& params,
                   const std::vector<std::span<const double>>& grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("Adagrad: parameter and gradient block counts differ");
  }
  if (accumulators_.empty()) {
    for (const auto& p : params) accumulators_.emplace_back(p.size(), 0.0);
  }
  if (accumulators_.size() != params.size()) {
    throw ShapeError("Adagrad: block count changed between steps");
  }
  for (size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size() ||
        params[b].size() != accumulators_[b].size()) {
      throw ShapeError("Adagrad: block " + std::to_string(b) + " size mismatch");
    }
  }
  for (size_t b = 0; b < params.size(); ++b) {
    auto& acc = accumulators_[b];
    for (size_t i = 0; i < acc.size(); ++i) {
      const double g = grads[b][i];
      acc[i] += g * g;
      params[b][i] -= learning_rate_ * g / (std::sqrt(acc[i]) + epsilon_);
    }
  }
}

}  // namespace densestereo
