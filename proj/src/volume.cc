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

#include "densestereo/volume.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace densestereo {

namespace {

void check_dims(int height, int width, const char* what) {
  if (height < 1 || width < 1) {
    throw InvalidParameter(std::string(what) + ": height and width must be >= 1");
  }
}

}  // namespace

Image::Image(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, "Image");
  if (channels != 1 && channels != 3) {
    throw InvalidParameter("Image: channels must be 1 or 3");
  }
  values_.assign(static_cast<size_t>(height) * width * channels, fill);
}

Image Image::to_rgb() const {
  if (channels_ == 3) return *this;
  Image out(height_, width_, 3);
  for (int i = 0; i < pixels(); ++i) {
    for (int c = 0; c < 3; ++c) out.values_[i * 3 + c] = values_[i];
  }
  return out;
}

CostVolume::CostVolume(int height, int width, int labels, double fill)
    : height_(height), width_(width), labels_(labels) {
  check_dims(height, width, "CostVolume");
  if (labels < 1) throw InvalidParameter("CostVolume: d_max must be >= 1");
  values_.assign(static_cast<size_t>(height) * width * labels, fill);
}

bool CostVolume::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

DisparityMap::DisparityMap(int height, int width, double fill)
    : height_(height), width_(width) {
  check_dims(height, width, "DisparityMap");
  values_.assign(static_cast<size_t>(height) * width,
                 is_missing(fill) ? kMissing : fill);
}

DisparityMap DisparityMap::from_raw(int height, int width,
                                    std::vector<double> values) {
  if (values.size() != static_cast<size_t>(height) * width) {
    throw ShapeError("DisparityMap: value count does not match shape");
  }
  DisparityMap map(height, width);
  for (size_t i = 0; i < values.size(); ++i) {
    map.values_[i] = is_missing(values[i]) ? kMissing : values[i];
  }
  return map;
}

bool DisparityMap::is_missing(double v) { return !std::isfinite(v) || v < 0; }

void DisparityMap::set(int y, int x, double v) {
  set(y * width_ + x, v);
}

void DisparityMap::set(int i, double v) {
  values_[i] = is_missing(v) ? kMissing : v;
}

ValidityMask::ValidityMask(int height, int width, bool fill)
    : height_(height), width_(width) {
  check_dims(height, width, "ValidityMask");
  values_.assign(static_cast<size_t>(height) * width, fill ? 1 : 0);
}

ValidityMask ValidityMask::from_disparity(const DisparityMap& gt) {
  ValidityMask mask(gt.height(), gt.width());
  for (int i = 0; i < gt.pixels(); ++i) mask.set(i, !gt.missing(i));
  return mask;
}

int ValidityMask::count() const {
  return static_cast<int>(std::count(values_.begin(), values_.end(), 1));
}

DisparityMap argmax_disparity(const CostVolume& volume, Extremum mode) {
  DisparityMap out(volume.height(), volume.width(), 0.0);
  for (int i = 0; i < volume.pixels(); ++i) {
    auto v = volume.pixel(i);
    int best = 0;
    for (int d = 1; d < volume.labels(); ++d) {
      bool better = mode == Extremum::kMax ? v[d] > v[best] : v[d] < v[best];
      if (better) best = d;
    }
    out.set(i, best);
  }
  return out;
}

void softmax_inplace(std::span<double> values) {
  double peak = *std::max_element(values.begin(), values.end());
  double total = 0;
  for (double& v : values) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : values) v /= total;
}

void softmax_backward_pixel(std::span<const double> grad_out,
                            std::span<const double> softmax_out,
                            std::span<double> grad_in) {
  double dot = 0;
  for (size_t k = 0; k < grad_out.size(); ++k) dot += grad_out[k] * softmax_out[k];
  for (size_t k = 0; k < grad_out.size(); ++k) {
    grad_in[k] = softmax_out[k] * (grad_out[k] - dot);
  }
}

CostVolume softmax_over_disparities(const CostVolume& volume) {
  CostVolume out = volume;
  for (int i = 0; i < out.pixels(); ++i) softmax_inplace(out.pixel(i));
  out.set_normalized(true);
  return out;
}

CostVolume softmax_backward(const CostVolume& grad_out,
                            const CostVolume& softmax_out) {
  if (!grad_out.same_shape(softmax_out)) {
    throw ShapeError("softmax_backward: gradient and output shapes differ");
  }
  if (!softmax_out.normalized()) {
    throw InvalidParameter("softmax_backward: softmax output is not normalized");
  }
  CostVolume grad_in(grad_out.height(), grad_out.width(), grad_out.labels());
  for (int i = 0; i < grad_in.pixels(); ++i) {
    softmax_backward_pixel(grad_out.pixel(i), softmax_out.pixel(i),
                           grad_in.pixel(i));
  }
  return grad_in;
}

}  // namespace densestereo
