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


#include "densestereo/sgm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "densestereo/errors.h"
#include "densestereo/join.h"
#include "densestereo/losses.h"

namespace densestereo {

namespace {

constexpr int kDirs[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                             {1, 1},  {-1, -1}, {-1, 1}, {1, -1}};

// One direction (dx, dy); adds L_r into out.
void aggregate_direction(const CostVolume& costs, const SgmConfig& config,
                         int dx, int dy, CostVolume& out) {
  const int h = costs.height(), w = costs.width(), dn = costs.labels();
  std::vector<double> paths(costs.size());
  std::vector<double> row_min(static_cast<size_t>(h) * w);
  const int y_begin = dy >= 0 ? 0 : h - 1, y_step = dy >= 0 ? 1 : -1;
  const int x_begin = dx >= 0 ? 0 : w - 1, x_step = dx >= 0 ? 1 : -1;
  for (int yi = 0, y = y_begin; yi < h; ++yi, y += y_step) {
    for (int xi = 0, x = x_begin; xi < w; ++xi, x += x_step) {
      const int p = y * w + x;
      const auto c = costs.pixel(p);
      double* l = &paths[static_cast<size_t>(p) * dn];
      const int py = y - dy, px = x - dx;
      if (py < 0 || py >= h || px < 0 || px >= w) {
        for (int d = 0; d < dn; ++d) l[d] = c[d];
      } else {
        const int q = py * w + px;
        const double* prev = &paths[static_cast<size_t>(q) * dn];
        const double m = row_min[q];
        for (int d = 0; d < dn; ++d) {
          double best = prev[d];
          if (d > 0) best = std::min(best, prev[d - 1] + config.p1);
          if (d + 1 < dn) best = std::min(best, prev[d + 1] + config.p1);
          best = std::min(best, m + config.p2);
          l[d] = c[d] + best - m;
        }
      }
      row_min[p] = *std::min_element(l, l + dn);
    }
  }
  auto o = out.data();
  for (size_t k = 0; k < paths.size(); ++k) o[k] += paths[k];
}

double lower_median(std::vector<double>& v) {
  const size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

}  // namespace

void SgmConfig::validate() const {
  if (!(p1 > 0) || !(p2 >= p1) || !std::isfinite(p2)) {
    throw InvalidParameter("SgmConfig: need 0 < p1 <= p2");
  }
  if (directions != 4 && directions != 8) {
    throw InvalidParameter("SgmConfig: directions must be 4 or 8");
  }
}

CostVolume sgm_aggregate(const CostVolume& costs, const SgmConfig& config) {
  if (costs.labels() < 2) throw InvalidParameter("sgm_aggregate: d_max must be >= 2");
  // p1 = p2 = 0 is allowed here as the degenerate "no smoothing" case.
  if (!(config.p1 == 0 && config.p2 == 0)) config.validate();
  if (config.directions != 4 && config.directions != 8) {
    throw InvalidParameter("SgmConfig: directions must be 4 or 8");
  }
  CostVolume out(costs.height(), costs.width(), costs.labels());
  for (int r = 0; r < config.directions; ++r) {
    aggregate_direction(costs, config, kDirs[r][0], kDirs[r][1], out);
  }
  return out;
}

CostVolume similarity_to_cost(const CostVolume& similarity) {
  CostVolume out(similarity.height(), similarity.width(), similarity.labels());
  auto s = similarity.data();
  auto o = out.data();
  for (size_t k = 0; k < s.size(); ++k) {
    o[k] = s[k] <= kOutOfImageScore ? kOutOfImageCost : 0.5 * (1.0 - s[k]);
  }
  return out;
}

CostVolume probability_to_cost(const CostVolume& q) {
  CostVolume out(q.height(), q.width(), q.labels());
  auto s = q.data();
  auto o = out.data();
  for (size_t k = 0; k < s.size(); ++k) {
    o[k] = -std::log(std::max(s[k], kProbabilityFloor));
  }
  return out;
}

DisparityMap right_disparity(const CostVolume& costs) {
  const int h = costs.height(), w = costs.width(), dn = costs.labels();
  DisparityMap out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int q = 0; q < w; ++q) {
      int best = -1;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int d = 0; d < dn && q + d < w; ++d) {
        const double c = costs.at(y, q + d, d);
        if (c < best_cost) {
          best_cost = c;
          best = d;
        }
      }
      if (best >= 0) out.set(y, q, best);
    }
  }
  return out;
}

LeftRightResult left_right_check(const DisparityMap& d_left,
                                 const DisparityMap& d_right, double tol) {
  const int h = d_left.height(), w = d_left.width();
  if (d_right.height() != h || d_right.width() != w) {
    throw ShapeError("left_right_check: maps differ in H x W");
  }
  LeftRightResult r{ValidityMask(h, w), DisparityMap(h, w)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double d = d_left.at(y, x);
      if (DisparityMap::is_missing(d)) continue;
      const int xr = static_cast<int>(std::lround(x - d));
      if (xr < 0 || xr >= w) continue;
      const double dr = d_right.at(y, xr);
      if (!DisparityMap::is_missing(dr) && std::abs(d - dr) <= tol) {
        r.consistent.set(y, x, true);
      }
    }
    for (int x = 0; x < w; ++x) {
      if (r.consistent.at(y, x)) {
        r.filled.set(y, x, d_left.at(y, x));
        continue;
      }
      double fill = DisparityMap::kMissing;
      for (int k = x - 1; k >= 0; --k) {
        if (r.consistent.at(y, k)) {
          fill = d_left.at(y, k);
          break;
        }
      }
      for (int k = x + 1; k < w; ++k) {
        if (r.consistent.at(y, k)) {
          const double v = d_left.at(y, k);
          fill = DisparityMap::is_missing(fill) ? v : std::min(fill, v);
          break;
        }
      }
      r.filled.set(y, x, fill);
    }
  }
  return r;
}

DisparityMap subpixel_refine(const CostVolume& costs, const DisparityMap& d) {
  if (costs.height() != d.height() || costs.width() != d.width()) {
    throw ShapeError("subpixel_refine: volume and map differ in H x W");
  }
  DisparityMap out = d;
  for (int i = 0; i < d.pixels(); ++i) {
    if (d.missing(i)) continue;
    const double v = d[i];
    if (v != std::floor(v)) continue;
    const int k = static_cast<int>(v);
    if (k < 1 || k + 1 >= costs.labels()) continue;
    const auto c = costs.pixel(i);
    const double denom = c[k + 1] - 2 * c[k] + c[k - 1];
    if (!(denom > 0) || !std::isfinite(denom)) continue;
    out.set(i, k - (c[k + 1] - c[k - 1]) / (2 * denom));
  }
  return out;
}

DisparityMap median_filter(const DisparityMap& d, int window) {
  if (window < 1 || window % 2 == 0) {
    throw InvalidParameter("median_filter: window must be odd and >= 1");
  }
  const int h = d.height(), w = d.width(), r = window / 2;
  DisparityMap out(h, w);
  std::vector<double> pop;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      pop.clear();
      for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy) {
        for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
          const double v = d.at(yy, xx);
          if (!DisparityMap::is_missing(v)) pop.push_back(v);
        }
      }
      if (!pop.empty()) out.set(y, x, lower_median(pop));
    }
  }
  return out;
}

PostMode parse_post_mode(std::string_view name) {
  if (name == "none") return PostMode::kNone;
  if (name == "full") return PostMode::kFull;
  throw InvalidParameter("unknown post mode '" + std::string(name) + "'");
}

DisparityMap postprocess(const CostVolume& costs, PostMode mode) {
  DisparityMap d = argmax_disparity(costs, Extremum::kMin);
  if (mode == PostMode::kNone) return d;
  LeftRightResult lr = left_right_check(d, right_disparity(costs));
  DisparityMap refined = subpixel_refine(costs, d);
  DisparityMap merged = lr.filled;
  for (int i = 0; i < merged.pixels(); ++i) {
    if (lr.consistent[i]) merged.set(i, refined[i]);
  }
  return median_filter(merged, 5);
}

}  // namespace densestereo
