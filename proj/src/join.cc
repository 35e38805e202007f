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


#include "densestereo/join.h"

#include <string>

#include "densestereo/errors.h"

namespace densestereo {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (size_t k = 0; k < x.size(); ++k) y[k] += a * x[k];
}

void check_grad(const CostVolume& grad, const DescriptorField& field) {
  if (grad.height() != field.height() || grad.width() != field.width()) {
    throw ShapeError("join backward: gradient and descriptors differ in H x W");
  }
}

}  // namespace

CostVolume join_forward(const DescriptorField& left,
                        const DescriptorField& right, int d_max) {
  if (!left.same_shape(right)) {
    throw ShapeError("join_forward: left and right descriptor fields differ");
  }
  if (d_max < 1) throw InvalidParameter("join_forward: d_max must be >= 1");
  if (d_max > left.width()) {
    throw InvalidParameter("join_forward: d_max " + std::to_string(d_max) +
                           " exceeds image width " + std::to_string(left.width()));
  }
  const int h = left.height(), w = left.width();
  CostVolume out(h, w, d_max);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int p = y * w + x;
      auto scores = out.pixel(p);
      for (int d = 0; d < d_max; ++d) {
        scores[d] = x - d >= 0 ? dot(left.at(p), right.at(p - d)) : kOutOfImageScore;
      }
    }
  }
  return out;
}

DescriptorField join_backward_left(const CostVolume& grad_out,
                                   const DescriptorField& right) {
  check_grad(grad_out, right);
  const int h = right.height(), w = right.width();
  DescriptorField g(h, w, right.dim(), Side::kLeft);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int p = y * w + x;
      auto gp = grad_out.pixel(p);
      for (int d = 0; d < grad_out.labels() && x - d >= 0; ++d) {
        if (gp[d] != 0) axpy(gp[d], right.at(p - d), g.at(p));
      }
    }
  }
  return g;
}

DescriptorField join_backward_right(const CostVolume& grad_out,
                                    const DescriptorField& left) {
  check_grad(grad_out, left);
  const int h = left.height(), w = left.width();
  DescriptorField g(h, w, left.dim(), Side::kRight);
  for (int y = 0; y < h; ++y) {
    for (int q = 0; q < w; ++q) {
      const int i = y * w + q;
      for (int d = 0; d < grad_out.labels() && q + d < w; ++d) {
        const double gv = grad_out.pixel(i + d)[d];
        if (gv != 0) axpy(gv, left.at(i + d), g.at(i));
      }
    }
  }
  return g;
}

}  // namespace densestereo
