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

#ifndef DENSESTEREO_FEATURES_H_
#define DENSESTEREO_FEATURES_H_

#include <span>
#include <vector>

#include "densestereo/volume.h"

namespace densestereo {

// Gaussian widths of the two pairwise kernels: theta_alpha (pixels) and
// theta_beta (intensity units) for the appearance kernel, theta_gamma
// (pixels) for the smoothness kernel.
struct KernelWidths {
  double theta_alpha = 18.65;
  double theta_beta = 4.39;
  double theta_gamma = 2.13;

  // Throws InvalidParameter unless all three are finite and positive.
  void validate() const;
  bool operator==(const KernelWidths&) const = default;
};

// Per-pixel feature vectors, pixel-major. Pixel i = y * width + x.
class FeatureField {
 public:
  FeatureField() = default;
  FeatureField(int height, int width, int dim);

  int height() const { return height_; }
  int width() const { return width_; }
  int pixels() const { return height_ * width_; }
  int dim() const { return dim_; }

  std::span<double> at(int i) {
    return {values_.data() + static_cast<size_t>(i) * dim_,
            static_cast<size_t>(dim_)};
  }
  std::span<const double> at(int i) const {
    return {values_.data() + static_cast<size_t>(i) * dim_,
            static_cast<size_t>(dim_)};
  }
  std::span<const double> data() const { return values_; }

 private:
  int height_ = 0;
  int width_ = 0;
  int dim_ = 0;
  std::vector<double> values_;
};

// (x/theta_alpha, y/theta_alpha, R/theta_beta, G/theta_beta, B/theta_beta).
// Grayscale input is replicated to three channels.
FeatureField bilateral_features(const Image& image, const KernelWidths& widths);

// (x/theta_gamma, y/theta_gamma).
FeatureField spatial_features(int height, int width, const KernelWidths& widths);

// exp(-|a - b|^2 / 2).
double gaussian_kernel(std::span<const double> a, std::span<const double> b);

}  // namespace densestereo

#endif  // DENSESTEREO_FEATURES_H_
