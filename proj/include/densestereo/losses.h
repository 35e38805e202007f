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


#ifndef DENSESTEREO_LOSSES_H_
#define DENSESTEREO_LOSSES_H_

#include <optional>
#include <string_view>

#include "densestereo/volume.h"

namespace densestereo {

inline constexpr double kProbabilityFloor = 1e-12;

enum class LossKind { kCrossEntropy, kPiecewiseLinear };

LossKind parse_loss_kind(std::string_view name);
std::string_view loss_kind_name(LossKind kind);

struct LossResult {
  double loss = 0;
  CostVolume grad;
};

// Mean over valid pixels of -log q(p, gt(p)). gt must be integer where valid.
LossResult cross_entropy(const CostVolume& q, const DisparityMap& gt,
                         const ValidityMask& mask);

// Mean over valid pixels of -log((1-a) q(p,k) + a q(p,k+1)), k = floor(gt).
LossResult piecewise_linear(const CostVolume& q, const DisparityMap& gt,
                            const ValidityMask& mask);

// Mean over valid pixels of -alpha sum_l q log q.
LossResult entropy_penalty(const CostVolume& q, double alpha,
                           const ValidityMask& mask);

struct LossConfig {
  LossKind kind = LossKind::kCrossEntropy;
  double entropy_alpha = 0.1;
};

// Primary loss plus entropy penalty, gradients summed.
LossResult training_loss(const CostVolume& q, const DisparityMap& gt,
                         const ValidityMask& mask, const LossConfig& config);

struct MaskOptions {
  bool left_right_consistency = true;
  bool exposure_ceiling = true;
  double max_intensity = 250.0;
  double consistency_tolerance = 0.5;
};

// Valid where gt is present, below d_max, points inside the right image,
// agrees with gt_right (if given) and the reference pixel is not saturated.
ValidityMask build_training_mask(const DisparityMap& gt_left,
                                 const DisparityMap* gt_right,
                                 const Image& left, int d_max,
                                 const MaskOptions& options = {});

}  // namespace densestereo

#endif  // DENSESTEREO_LOSSES_H_
