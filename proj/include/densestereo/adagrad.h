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


#ifndef DENSESTEREO_ADAGRAD_H_
#define DENSESTEREO_ADAGRAD_H_

#include <span>
#include <vector>

namespace densestereo {

// Adagrad over a fixed list of parameter blocks:
//   G += g^2;  theta -= lr * g / (sqrt(G) + eps).
// Block shapes are fixed by the first step.
class Adagrad {
 public:
  explicit Adagrad(double learning_rate = 0.1, double epsilon = 1e-8);

  double learning_rate() const { return learning_rate_; }
  double epsilon() const { return epsilon_; }
  void set_learning_rate(double lr);

  void step(std::span<double> params, std::span<const double> grads);
  void step(const std::vector<std::span<double>>& params,
            const std::vector<std::span<const double>>& grads);

  const std::vector<std::vector<double>>& accumulators() const {
    return accumulators_;
  }
  void reset() { accumulators_.clear(); }

 private:
  double learning_rate_;
  double epsilon_;
  std::vector<std::vector<double>> accumulators_;
};

}  // namespace densestereo

#endif  // DENSESTEREO_ADAGRAD_H_
