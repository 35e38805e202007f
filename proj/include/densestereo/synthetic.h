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


#ifndef DENSESTEREO_SYNTHETIC_H_
#define DENSESTEREO_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "densestereo/losses.h"
#include "densestereo/sample.h"

namespace densestereo {

// Fronto-parallel rectangle in left-image coordinates, half-open.
struct SceneRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  int disparity = 0;
  uint64_t texture_seed = 0;
  double contrast = 1.0;
};

struct SceneSpec {
  int height = 64;
  int width = 64;
  int background_disparity = 0;
  uint64_t background_seed = 0;
  double background_contrast = 1.0;
  std::vector<SceneRect> rects;  // larger disparity occludes smaller
  double noise = 0.0;            // Gaussian sigma, intensity units
  uint64_t noise_seed = 0;
};

struct StereogramOptions {
  int height = 64;
  int width = 64;
  int d_max = 16;
  int shapes = 4;
  double noise = 4.0;
  double min_contrast = 0.15;
};

// Procedural RGB texture value of one layer at integer coordinates.
double scene_texture(uint64_t seed, double contrast, int x, int y, int channel);

// Renders both views with occlusion; gt is exact on both sides and the
// mask comes from build_training_mask with d_max = max disparity + 1.
StereoSample render_scene(const SceneSpec& spec);

SceneSpec random_scene(uint64_t seed, const StereogramOptions& options);

// Random scene: background at a small disparity, `shapes` rectangles
// nearer than it, all below d_max.
StereoSample make_stereogram(uint64_t seed, const StereogramOptions& options);

// Seed of the i-th sample of a dataset generated from `seed`.
uint64_t sample_seed(uint64_t seed, int index);

}  // namespace densestereo

#endif  // DENSESTEREO_SYNTHETIC_H_
