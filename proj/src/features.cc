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

#include "densestereo/features.h"

#include <cmath>

namespace densestereo {

void KernelWidths::validate() const {
  for (double w : {theta_alpha, theta_beta, theta_gamma}) {
    if (!(std::isfinite(w) && w > 0)) {
      throw InvalidParameter("kernel widths must be finite and positive");
    }
  }
}

FeatureField::FeatureField(int height, int width, int dim)
    : height_(height), width_(width), dim_(dim) {
  if (height < 1 || width < 1 || dim < 1) {
    throw InvalidParameter("FeatureField: empty shape");
  }
  values_.assign(static_cast<size_t>(height) * width * dim, 0.0);
}

FeatureField bilateral_features(const Image& image, const KernelWidths& widths) {
  widths.validate();
  const Image rgb = image.to_rgb();
  FeatureField f(rgb.height(), rgb.width(), 5);
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      auto v = f.at(y * rgb.width() + x);
      v[0] = x / widths.theta_alpha;
      v[1] = y / widths.theta_alpha;
      for (int c = 0; c < 3; ++c) v[2 + c] = rgb.at(y, x, c) / widths.theta_beta;
    }
  }
  return f;
}

FeatureField spatial_features(int height, int width, const KernelWidths& widths) {
  widths.validate();
  FeatureField f(height, width, 2);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      auto v = f.at(y * width + x);
      v[0] = x / widths.theta_gamma;
      v[1] = y / widths.theta_gamma;
    }
  }
  return f;
}

double gaussian_kernel(std::span<const double> a, std::span<const double> b) {
  double d2 = 0;
  for (size_t k = 0; k < a.size(); ++k) {
    double t = a[k] - b[k];
    d2 += t * t;
  }
  return std::exp(-0.5 * d2);
}

}  // namespace densestereo
