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


#ifndef DENSESTEREO_SIAMESE_H_
#define DENSESTEREO_SIAMESE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "densestereo/tape.h"
#include "densestereo/volume.h"

namespace densestereo {

enum class Side { kLeft, kRight };

// Per-pixel descriptors, dim innermost.
class DescriptorField {
 public:
  DescriptorField() = default;
  DescriptorField(int height, int width, int dim, Side side = Side::kLeft);

  int height() const { return height_; }
  int width() const { return width_; }
  int pixels() const { return height_ * width_; }
  int dim() const { return dim_; }
  Side side() const { return side_; }
  void set_side(Side s) { side_ = s; }

  std::span<double> at(int i) {
    return {values_.data() + static_cast<size_t>(i) * dim_,
            static_cast<size_t>(dim_)};
  }
  std::span<const double> at(int i) const {
    return {values_.data() + static_cast<size_t>(i) * dim_,
            static_cast<size_t>(dim_)};
  }
  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  bool same_shape(const DescriptorField& o) const {
    return height_ == o.height_ && width_ == o.width_ && dim_ == o.dim_;
  }
  bool operator==(const DescriptorField&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int dim_ = 0;
  Side side_ = Side::kLeft;
  std::vector<double> values_;
};

// Square convolution with zero padding; weights are [out][in][ky][kx].
struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  std::vector<double> weights;
  std::vector<double> bias;

  size_t weight_count() const {
    return static_cast<size_t>(out_channels) * in_channels * kernel * kernel;
  }
  bool operator==(const ConvLayer&) const = default;
};

struct SiameseConfig {
  int in_channels = 3;
  std::vector<int> channels = {32, 32, 32, 32};
  int kernel = 3;
  bool standardize_input = true;
  bool normalize_output = true;
};

// Gradients for every layer, same shapes as the net.
struct NetGradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;

  void add(const NetGradients& other);
  void scale(double s);
  std::vector<std::span<const double>> blocks() const;
};

class SiameseNet {
 public:
  SiameseNet() = default;
  // He-initialized weights, zero biases.
  static SiameseNet random(const SiameseConfig& config, uint64_t seed);
  // One 1x1 layer copying the input channels.
  static SiameseNet identity(int channels);

  const std::vector<ConvLayer>& layers() const { return layers_; }
  std::vector<ConvLayer>& layers() { return layers_; }
  int in_channels() const;
  int out_dim() const;
  bool standardize_input() const { return standardize_input_; }
  bool normalize_output() const { return normalize_output_; }
  void set_standardize_input(bool v) { standardize_input_ = v; }
  void set_normalize_output(bool v) { normalize_output_ = v; }

  // Forward pass. With a tape, pushes one "siamese" record.
  DescriptorField describe(const Image& image, Side side = Side::kLeft,
                           GradientTape* tape = nullptr) const;
  // Pops the matching record and returns weight gradients.
  NetGradients backward(const DescriptorField& grad, GradientTape& tape) const;

  NetGradients zero_gradients() const;
  // Weight and bias arrays in layer order, matching NetGradients::blocks().
  std::vector<std::span<double>> parameter_blocks();
  size_t parameter_count() const;

  void save(const std::string& path) const;
  static SiameseNet load(const std::string& path);
  std::string serialize() const;
  static SiameseNet deserialize(std::string_view bytes);

  bool operator==(const SiameseNet&) const = default;

 private:
  std::vector<ConvLayer> layers_;
  bool standardize_input_ = true;
  bool normalize_output_ = true;
};

// Planar [c][y][x] input prepared for the first layer.
std::vector<double> prepare_input(const Image& image, int channels,
                                  bool standardize);

}  // namespace densestereo

#endif  // DENSESTEREO_SIAMESE_H_
