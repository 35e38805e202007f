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


#include "densestereo/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "densestereo/errors.h"

namespace densestereo {

namespace {

uint64_t mix(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double hash01(uint64_t seed, int64_t a, int64_t b, int64_t c) {
  uint64_t h = mix(seed ^ mix(static_cast<uint64_t>(a) ^ mix(
                                  static_cast<uint64_t>(b) ^ mix(c))));
  return (h >> 11) * (1.0 / 9007199254740992.0);
}

int64_t floor_div(int64_t a, int s) { return a >= 0 ? a / s : -((-a + s - 1) / s); }

// Index of the layer seen at left column x (rects sorted nearest first), or
// -1 for the background.
int layer_at(const std::vector<SceneRect>& rects, int x, int y) {
  for (size_t k = 0; k < rects.size(); ++k) {
    const SceneRect& r = rects[k];
    if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1) return static_cast<int>(k);
  }
  return -1;
}

}  // namespace

uint64_t sample_seed(uint64_t seed, int index) {
  return mix(seed * 0x100000001b3ULL + static_cast<uint64_t>(index));
}

double scene_texture(uint64_t seed, double contrast, int x, int y, int channel) {
  const double base = 70.0 + 110.0 * hash01(seed, -1, -1, channel);
  double v = 0;
  constexpr int kScales[3] = {1, 2, 4};
  constexpr double kAmplitude[3] = {50.0, 40.0, 30.0};
  for (int o = 0; o < 3; ++o) {
    const int64_t cx = floor_div(x, kScales[o]);
    const int64_t cy = floor_div(y, kScales[o]);
    const double luma = hash01(seed + 17 * (o + 1), cx, cy, 3) - 0.5;
    const double tint = hash01(seed + 17 * (o + 1), cx, cy, channel) - 0.5;
    v += kAmplitude[o] * (0.8 * luma + 0.2 * tint);
  }
  return std::clamp(base + contrast * v, 5.0, 240.0);
}

StereoSample render_scene(const SceneSpec& spec) {
  const int h = spec.height, w = spec.width;
  if (h < 1 || w < 1) throw InvalidParameter("render_scene: empty image");
  if (spec.background_disparity < 0) {
    throw InvalidParameter("render_scene: negative background disparity");
  }
  std::vector<SceneRect> rects = spec.rects;
  for (const SceneRect& r : rects) {
    if (r.disparity < 0 || r.x0 >= r.x1 || r.y0 >= r.y1) {
      throw InvalidParameter("render_scene: degenerate rectangle");
    }
  }
  std::stable_sort(rects.begin(), rects.end(),
                   [](const SceneRect& a, const SceneRect& b) {
                     return a.disparity > b.disparity;
                   });
  StereoSample s;
  s.left = Image(h, w, 3);
  s.right = Image(h, w, 3);
  s.gt_left = DisparityMap(h, w);
  DisparityMap gt_right(h, w);
  int max_disparity = spec.background_disparity;
  for (const SceneRect& r : rects) max_disparity = std::max(max_disparity, r.disparity);

  auto shade = [&](int layer, int x, int y, int c) {
    return layer < 0 ? scene_texture(spec.background_seed,
                                     spec.background_contrast, x, y, c)
                     : scene_texture(rects[layer].texture_seed,
                                     rects[layer].contrast, x, y, c);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int layer = layer_at(rects, x, y);
      s.gt_left.set(y, x, layer < 0 ? spec.background_disparity
                                     : rects[layer].disparity);
      for (int c = 0; c < 3; ++c) s.left.at(y, x, c) = shade(layer, x, y, c);
    }
    // Right column xr sees left column xr + d of the nearest layer there.
    for (int xr = 0; xr < w; ++xr) {
      int seen = -1;
      for (size_t k = 0; k < rects.size(); ++k) {
        const SceneRect& r = rects[k];
        const int x = xr + r.disparity;
        if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1) {
          seen = static_cast<int>(k);
          break;
        }
      }
      const int d = seen < 0 ? spec.background_disparity : rects[seen].disparity;
      gt_right.set(y, xr, d);
      for (int c = 0; c < 3; ++c) s.right.at(y, xr, c) = shade(seen, xr + d, y, c);
    }
  }
  std::mt19937_64 rng(spec.noise_seed);
  std::normal_distribution<double> noise(0.0, spec.noise > 0 ? spec.noise : 1.0);
  for (Image* img : {&s.left, &s.right}) {
    for (double& v : img->data()) {
      if (spec.noise > 0) v += noise(rng);
      v = std::clamp(std::round(v), 0.0, 255.0);
    }
  }
  s.gt_right = gt_right;
  s.mask = build_training_mask(s.gt_left, &*s.gt_right, s.left, max_disparity + 1);
  return s;
}

SceneSpec random_scene(uint64_t seed, const StereogramOptions& o) {
  if (o.d_max < 2 || o.d_max * 4 > o.width) {
    throw InvalidParameter("make_stereogram: need 2 <= d_max <= width/4 (d_max " +
                           std::to_string(o.d_max) + ", width " +
                           std::to_string(o.width) + ")");
  }
  if (o.height < 8 || o.shapes < 0 || o.noise < 0) {
    throw InvalidParameter("make_stereogram: infeasible geometry");
  }
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  SceneSpec spec;
  spec.height = o.height;
  spec.width = o.width;
  spec.background_disparity = uniform_int(0, o.d_max / 4);
  spec.background_seed = rng();
  spec.background_contrast = uniform(o.min_contrast, 1.0);
  spec.noise = o.noise;
  spec.noise_seed = rng();
  for (int k = 0; k < o.shapes; ++k) {
    SceneRect r;
    const int rw = uniform_int(std::max(2, o.width / 6), std::max(2, o.width / 2));
    const int rh = uniform_int(std::max(2, o.height / 6), std::max(2, o.height / 2));
    r.x0 = uniform_int(0, o.width - rw);
    r.y0 = uniform_int(0, o.height - rh);
    r.x1 = r.x0 + rw;
    r.y1 = r.y0 + rh;
    r.disparity = uniform_int(std::min(spec.background_disparity + 1, o.d_max - 1),
                              o.d_max - 1);
    r.texture_seed = rng();
    r.contrast = uniform(o.min_contrast, 1.0);
    spec.rects.push_back(r);
  }
  return spec;
}

StereoSample make_stereogram(uint64_t seed, const StereogramOptions& options) {
  return render_scene(random_scene(seed, options));
}

}  // namespace densestereo
