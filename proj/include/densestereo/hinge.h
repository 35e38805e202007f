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


#ifndef DENSESTEREO_HINGE_H_
#define DENSESTEREO_HINGE_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "densestereo/sample.h"
#include "densestereo/siamese.h"

namespace densestereo {

// Left pixel (y, x) with its true disparity and a wrong one.
struct HingePair {
  int y = 0;
  int x = 0;
  int d_pos = 0;
  int d_neg = 0;
};

struct HingeResult {
  double loss = 0;  // mean of max(0, margin + s_neg - s_pos)
  int active = 0;   // pairs with a positive hinge
  DescriptorField grad_left;
  DescriptorField grad_right;
};

HingeResult hinge_loss(const DescriptorField& left, const DescriptorField& right,
                       std::span<const HingePair> pairs, double margin);

struct HingeConfig {
  double margin = 0.2;
  int epochs = 30;
  int pairs_per_image = 2048;
  int neg_min_offset = 2;
  int neg_max_offset = 6;
  double learning_rate = 0.05;
  uint64_t seed = 1;
  int threads = 1;
};

// Draws pairs at masked pixels; negatives sit neg_min..neg_max labels
// from the truth on either side and inside [0, d_max) and the image.
std::vector<HingePair> sample_hinge_pairs(const StereoSample& sample, int d_max,
                                          const HingeConfig& config,
                                          std::mt19937_64& rng);

// Adagrad on the hinge loss, one image pair per step.
SiameseNet hinge_pretrain(const SiameseNet& net,
                          std::span<const StereoSample> samples, int d_max,
                          const HingeConfig& config,
                          std::vector<double>* epoch_losses = nullptr);

}  // namespace densestereo

#endif  // DENSESTEREO_HINGE_H_
