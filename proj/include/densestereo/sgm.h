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


#ifndef DENSESTEREO_SGM_H_
#define DENSESTEREO_SGM_H_

#include <string_view>

#include "densestereo/volume.h"

namespace densestereo {

struct SgmConfig {
  double p1 = 1.0;
  double p2 = 32.0;
  int directions = 8;

  void validate() const;
};

// Sum over scanline directions r of
//   L_r(p,d) = C(p,d) + min(L_r(p-r,d), L_r(p-r,d+-1) + p1,
//                           min_k L_r(p-r,k) + p2) - min_k L_r(p-r,k).
// Costs are penalties: lower is better.
CostVolume sgm_aggregate(const CostVolume& costs, const SgmConfig& config);

// Penalty form of a similarity volume: (1 - s) / 2, out-of-image entries
// mapped to kOutOfImageCost.
CostVolume similarity_to_cost(const CostVolume& similarity);

// -log q with the loss floor.
CostVolume probability_to_cost(const CostVolume& q);

inline constexpr double kOutOfImageCost = 1e4;

// Right-view disparity read off a left-referenced penalty volume:
// argmin_d C(q + d, d) over entries inside the image.
DisparityMap right_disparity(const CostVolume& costs);

struct LeftRightResult {
  ValidityMask consistent;
  DisparityMap filled;
};

// p is consistent if |d_left(p) - d_right(p - d_left(p))| <= tol; the rest
// take the lower of the nearest consistent values left and right on the row.
LeftRightResult left_right_check(const DisparityMap& d_left,
                                 const DisparityMap& d_right, double tol = 1.0);

// Parabola through (d-1, d, d+1); boundary or non-convex fits unchanged.
DisparityMap subpixel_refine(const CostVolume& costs, const DisparityMap& d);

// Lower median over the clipped window, missing pixels ignored.
DisparityMap median_filter(const DisparityMap& d, int window = 5);

enum class PostMode { kNone, kFull };
PostMode parse_post_mode(std::string_view name);

// Argmin, then for kFull: left-right check and fill, subpixel on the
// consistent pixels, 5x5 median.
DisparityMap postprocess(const CostVolume& costs, PostMode mode);

}  // namespace densestereo

#endif  // DENSESTEREO_SGM_H_
