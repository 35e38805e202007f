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

#ifndef DENSESTEREO_PERMUTOHEDRAL_H_
#define DENSESTEREO_PERMUTOHEDRAL_H_

#include <span>
#include <vector>

#include "densestereo/features.h"

namespace densestereo {

// Permutohedral lattice over a fixed feature field (Adams et al. style
// splat / blur / slice). The operator approximates
//   out_i = sum_j exp(-|f_i - f_j|^2 / 2) in_j
// in O(N * (dim + 1)) per channel. Built once, then read-only.
class PermutohedralLattice {
 public:
  static constexpr int kMaxDim = 8;

  explicit PermutohedralLattice(const FeatureField& features);

  int points() const { return points_; }
  int dim() const { return dim_; }
  int vertices() const { return vertices_; }

  // in/out hold points() * channels values, pixel-major. With `transpose`
  // the blur axes run in reverse order, giving the exact adjoint.
  void filter(std::span<const double> in, std::span<double> out, int channels,
              bool transpose = false) const;

  // Diagonal of the lattice operator: the response at point i to a unit
  // impulse at point i.
  std::span<const double> self_response() const { return self_response_; }

  // Output scale mapping lattice mass onto the unit-height Gaussian.
  double output_scale() const { return output_scale_; }

 private:
  void compute_self_response();

  int points_ = 0;
  int dim_ = 0;
  int vertices_ = 0;
  double output_scale_ = 1.0;
  std::vector<int> offset_;          // points * (dim + 1) vertex ids
  std::vector<double> barycentric_;  // points * (dim + 1) weights
  std::vector<int> keys_;            // vertices * dim lattice coordinates
  std::vector<int> neighbor_plus_;   // (dim + 1) * vertices, -1 if absent
  std::vector<int> neighbor_minus_;  // (dim + 1) * vertices, -1 if absent
  std::vector<double> self_response_;
};

}  // namespace densestereo

#endif  // DENSESTEREO_PERMUTOHEDRAL_H_
