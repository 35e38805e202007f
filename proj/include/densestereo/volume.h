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

#ifndef DENSESTEREO_VOLUME_H_
#define DENSESTEREO_VOLUME_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "densestereo/errors.h"

namespace densestereo {

// Interleaved (row-major, channel-innermost) image with real intensities in
// [0, 255]. One or three channels.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  int pixels() const { return height_ * width_; }

  double& at(int y, int x, int c) {
    return values_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int y, int x, int c) const {
    return values_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  // Three-channel view; grayscale is replicated.
  Image to_rgb() const;

  bool operator==(const Image&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> values_;
};

// H x W x D volume of per-pixel, per-disparity values. Disparity is the
// innermost axis so per-pixel label operations touch contiguous memory.
class CostVolume {
 public:
  CostVolume() = default;
  CostVolume(int height, int width, int labels, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int labels() const { return labels_; }
  int pixels() const { return height_ * width_; }
  size_t size() const { return values_.size(); }

  double& at(int y, int x, int d) {
    return values_[(static_cast<size_t>(y) * width_ + x) * labels_ + d];
  }
  double at(int y, int x, int d) const {
    return values_[(static_cast<size_t>(y) * width_ + x) * labels_ + d];
  }

  std::span<double> pixel(int i) {
    return {values_.data() + static_cast<size_t>(i) * labels_,
            static_cast<size_t>(labels_)};
  }
  std::span<const double> pixel(int i) const {
    return {values_.data() + static_cast<size_t>(i) * labels_,
            static_cast<size_t>(labels_)};
  }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  // Set when every pixel holds a probability distribution over labels.
  bool normalized() const { return normalized_; }
  void set_normalized(bool v) { normalized_ = v; }

  bool same_shape(const CostVolume& o) const {
    return height_ == o.height_ && width_ == o.width_ && labels_ == o.labels_;
  }
  bool all_finite() const;

  bool operator==(const CostVolume&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int labels_ = 0;
  bool normalized_ = false;
  std::vector<double> values_;
};

// Real-valued disparity per pixel. Missing data is the canonical sentinel
// kMissing; any negative or non-finite value is normalized to it on write
// through set() or from_raw().
class DisparityMap {
 public:
  static constexpr double kMissing = -1.0;

  DisparityMap() = default;
  DisparityMap(int height, int width, double fill = kMissing);
  static DisparityMap from_raw(int height, int width,
                               std::vector<double> values);

  static bool is_missing(double v);

  int height() const { return height_; }
  int width() const { return width_; }
  int pixels() const { return height_ * width_; }

  double at(int y, int x) const {
    return values_[static_cast<size_t>(y) * width_ + x];
  }
  double operator[](int i) const { return values_[i]; }
  void set(int y, int x, double v);
  void set(int i, double v);
  bool missing(int i) const { return is_missing(values_[i]); }

  std::span<const double> data() const { return values_; }

  bool operator==(const DisparityMap&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

class ValidityMask {
 public:
  ValidityMask() = default;
  ValidityMask(int height, int width, bool fill = false);
  // Valid exactly where the ground truth is non-sentinel.
  static ValidityMask from_disparity(const DisparityMap& gt);

  int height() const { return height_; }
  int width() const { return width_; }
  int pixels() const { return height_ * width_; }
  int count() const;

  bool operator[](int i) const { return values_[i] != 0; }
  bool at(int y, int x) const {
    return values_[static_cast<size_t>(y) * width_ + x] != 0;
  }
  void set(int i, bool v) { values_[i] = v ? 1 : 0; }
  void set(int y, int x, bool v) {
    values_[static_cast<size_t>(y) * width_ + x] = v ? 1 : 0;
  }

  bool operator==(const ValidityMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<uint8_t> values_;
};

enum class Extremum { kMax, kMin };

// Per-pixel index of the extremum over disparities; ties go to the smaller
// index.
DisparityMap argmax_disparity(const CostVolume& volume,
                              Extremum mode = Extremum::kMax);

// Max-subtracted softmax over the label axis. Output is flagged normalized.
CostVolume softmax_over_disparities(const CostVolume& volume);

// grad_in(d) = s(d) * (grad_out(d) - sum_k grad_out(k) s(k)), per pixel.
CostVolume softmax_backward(const CostVolume& grad_out,
                            const CostVolume& softmax_out);

// In-place variants over a single pixel's label vector.
void softmax_inplace(std::span<double> values);
void softmax_backward_pixel(std::span<const double> grad_out,
                            std::span<const double> softmax_out,
                            std::span<double> grad_in);

}  // namespace densestereo

#endif  // DENSESTEREO_VOLUME_H_
