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


#include "densestereo/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "densestereo/errors.h"

namespace densestereo {

namespace {

void check_inputs(const CostVolume& q, const ValidityMask& mask, const char* what) {
  if (q.height() != mask.height() || q.width() != mask.width()) {
    throw ShapeError(std::string(what) + ": mask and volume differ in H x W");
  }
  if (mask.count() == 0) {
    throw EmptyMaskError(std::string(what) + ": no valid pixels");
  }
}

void check_gt(const CostVolume& q, const DisparityMap& gt, const char* what) {
  if (q.height() != gt.height() || q.width() != gt.width()) {
    throw ShapeError(std::string(what) + ": ground truth and volume differ in H x W");
  }
}

double clamped(double p) { return std::max(p, kProbabilityFloor); }

// Pairwise summation keeps the reduction order fixed.
double tree_sum(const std::vector<double>& v, size_t lo, size_t hi) {
  if (hi - lo <= 8) {
    double s = 0;
    for (size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  size_t mid = lo + (hi - lo) / 2;
  return tree_sum(v, lo, mid) + tree_sum(v, mid, hi);
}

double tree_sum(const std::vector<double>& v) { return tree_sum(v, 0, v.size()); }

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
  if (name == "cross-entropy" || name == "ce") return LossKind::kCrossEntropy;
  if (name == "piecewise-linear" || name == "pl") return LossKind::kPiecewiseLinear;
  throw InvalidParameter("unknown loss '" + std::string(name) + "'");
}

std::string_view loss_kind_name(LossKind kind) {
  return kind == LossKind::kCrossEntropy ? "cross-entropy" : "piecewise-linear";
}

LossResult cross_entropy(const CostVolume& q, const DisparityMap& gt,
                         const ValidityMask& mask) {
  check_inputs(q, mask, "cross_entropy");
  check_gt(q, gt, "cross_entropy");
  const int n = q.pixels();
  const double inv = 1.0 / mask.count();
  LossResult r{0, CostVolume(q.height(), q.width(), q.labels())};
  std::vector<double> terms;
  for (int i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const double g = gt[i];
    if (gt.missing(i) || g != std::floor(g) || g >= q.labels()) {
      throw InvalidParameter("cross_entropy: ground truth at pixel " +
                             std::to_string(i) + " is not a label");
    }
    const int k = static_cast<int>(g);
    const double p = q.pixel(i)[k];
    terms.push_back(-std::log(clamped(p)));
    if (p > kProbabilityFloor) r.grad.pixel(i)[k] = -inv / p;
  }
  r.loss = tree_sum(terms) * inv;
  return r;
}

LossResult piecewise_linear(const CostVolume& q, const DisparityMap& gt,
                            const ValidityMask& mask) {
  check_inputs(q, mask, "piecewise_linear");
  check_gt(q, gt, "piecewise_linear");
  const int n = q.pixels();
  const int d = q.labels();
  const double inv = 1.0 / mask.count();
  LossResult r{0, CostVolume(q.height(), q.width(), d)};
  std::vector<double> terms;
  for (int i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const double g = gt[i];
    if (gt.missing(i) || g > d - 1) {
      throw InvalidParameter("piecewise_linear: ground truth at pixel " +
                             std::to_string(i) + " is outside [0, d_max-1]");
    }
    const int k = std::min(static_cast<int>(std::floor(g)), d - 1);
    const double a = g - k;
    const auto qi = q.pixel(i);
    const double mixed = a > 0 ? (1 - a) * qi[k] + a * qi[k + 1] : qi[k];
    terms.push_back(-std::log(clamped(mixed)));
    if (mixed > kProbabilityFloor) {
      auto gi = r.grad.pixel(i);
      gi[k] = -inv * (1 - a) / mixed;
      if (a > 0) gi[k + 1] = -inv * a / mixed;
    }
  }
  r.loss = tree_sum(terms) * inv;
  return r;
}

LossResult entropy_penalty(const CostVolume& q, double alpha,
                           const ValidityMask& mask) {
  if (!(alpha >= 0) || !std::isfinite(alpha)) {
    throw InvalidParameter("entropy_penalty: alpha must be finite and >= 0");
  }
  check_inputs(q, mask, "entropy_penalty");
  const int n = q.pixels();
  const double inv = 1.0 / mask.count();
  LossResult r{0, CostVolume(q.height(), q.width(), q.labels())};
  std::vector<double> terms;
  for (int i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const auto qi = q.pixel(i);
    auto gi = r.grad.pixel(i);
    double s = 0;
    for (int l = 0; l < q.labels(); ++l) {
      const double lp = std::log(clamped(qi[l]));
      s -= alpha * qi[l] * lp;
      gi[l] = -alpha * (1 + lp) * inv;
    }
    terms.push_back(s);
  }
  r.loss = tree_sum(terms) * inv;
  return r;
}

LossResult training_loss(const CostVolume& q, const DisparityMap& gt,
                         const ValidityMask& mask, const LossConfig& config) {
  LossResult r = config.kind == LossKind::kCrossEntropy
                     ? cross_entropy(q, gt, mask)
                     : piecewise_linear(q, gt, mask);
  if (config.entropy_alpha > 0) {
    LossResult p = entropy_penalty(q, config.entropy_alpha, mask);
    r.loss += p.loss;
    auto g = r.grad.data();
    auto pg = p.grad.data();
    for (size_t k = 0; k < g.size(); ++k) g[k] += pg[k];
  }
  return r;
}

ValidityMask build_training_mask(const DisparityMap& gt_left,
                                 const DisparityMap* gt_right,
                                 const Image& left, int d_max,
                                 const MaskOptions& options) {
  const int h = gt_left.height(), w = gt_left.width();
  if (left.height() != h || left.width() != w ||
      (gt_right && (gt_right->height() != h || gt_right->width() != w))) {
    throw ShapeError("build_training_mask: inputs differ in H x W");
  }
  ValidityMask mask(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double g = gt_left.at(y, x);
      if (DisparityMap::is_missing(g) || g > d_max - 1 || x - g < 0) continue;
      if (options.left_right_consistency && gt_right) {
        const int xr = static_cast<int>(std::lround(x - g));
        if (xr < 0 || xr >= w) continue;
        const double gr = gt_right->at(y, xr);
        if (DisparityMap::is_missing(gr) ||
            std::abs(gr - g) > options.consistency_tolerance) {
          continue;
        }
      }
      if (options.exposure_ceiling) {
        bool saturated = false;
        for (int c = 0; c < left.channels(); ++c) {
          saturated |= left.at(y, x, c) >= options.max_intensity;
        }
        if (saturated) continue;
      }
      mask.set(y, x, true);
    }
  }
  return mask;
}

}  // namespace densestereo
