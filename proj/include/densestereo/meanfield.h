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

#ifndef DENSESTEREO_MEANFIELD_H_
#define DENSESTEREO_MEANFIELD_H_

#include <memory>
#include <string>
#include <vector>

#include "densestereo/features.h"
#include "densestereo/gaussian_filter.h"
#include "densestereo/keyvalue.h"
#include "densestereo/tape.h"
#include "densestereo/volume.h"

namespace densestereo {

// Trainable state of the dense CRF. Kernel weights are per label (one
// scalar per channel of the filtered volume); all label mixing goes
// through the d_max x d_max compatibility matrix, stored row-major.
struct CrfParams {
  KernelWidths widths;
  std::vector<double> w_appearance;
  std::vector<double> w_spatial;
  std::vector<double> compatibility;
  int iterations = 5;
  // Divide each message by the kernel mass at that pixel.
  bool normalize_messages = true;

  int labels() const { return static_cast<int>(w_appearance.size()); }
  double mu(int l, int lp) const {
    return compatibility[static_cast<size_t>(l) * labels() + lp];
  }

  // Operating point (18.65, 4.39, 2.13, 18.68, 68.68) with the banded
  // compatibility initialization.
  static CrfParams defaults(int labels);
  // Throws InvalidParameter / ShapeError on inconsistent or non-finite state.
  void validate() const;

  KeyValueFile to_keyvalue() const;
  static CrfParams from_keyvalue(const KeyValueFile& kv);
  void save(const std::string& path) const;
  static CrfParams load(const std::string& path);

  bool operator==(const CrfParams&) const = default;
};

struct CrfGradients {
  CostVolume d_unary;
  std::vector<double> d_w_appearance;
  std::vector<double> d_w_spatial;
  std::vector<double> d_compatibility;
};

// mu(i, j) = -1 + 0.2 |i - j| for |i - j| <= 4, else 0. Row-major.
std::vector<double> init_compatibility(int labels);

// The two Gaussian message filters of one image plus their per-pixel
// normalizers. Built once per (image, widths) and shared read-only.
class MessageFilters {
 public:
  MessageFilters(const Image& image, const KernelWidths& widths,
                 FilterMethod method, bool normalize);

  int height() const { return height_; }
  int width() const { return width_; }
  const KernelWidths& widths() const { return widths_; }
  FilterMethod method() const { return method_; }
  bool normalized() const { return normalize_; }

  // Self-excluded, optionally normalized messages for both kernels.
  void messages(const CostVolume& q, CostVolume& appearance,
                CostVolume& spatial) const;
  // Adjoint of messages(): accumulates into grad_q.
  void messages_transpose(const CostVolume& g_appearance,
                          const CostVolume& g_spatial,
                          CostVolume& grad_q) const;

  const GaussianFilter& appearance_filter() const { return appearance_; }
  const GaussianFilter& spatial_filter() const { return spatial_; }
  // 1 / (kernel response to all-ones, self included); ones when unnormalized.
  std::span<const double> appearance_scale() const { return appearance_scale_; }
  std::span<const double> spatial_scale() const { return spatial_scale_; }

 private:
  int height_;
  int width_;
  KernelWidths widths_;
  FilterMethod method_;
  bool normalize_;
  GaussianFilter appearance_;
  GaussianFilter spatial_;
  std::vector<double> appearance_scale_;
  std::vector<double> spatial_scale_;
};

// Unrolled mean-field inference. `unary_scores` are similarities (higher is
// a better match); iteration t computes
//   Q^t = softmax(unary - mu * (w_app . M_app(Q^{t-1}) + w_sp . M_sp(Q^{t-1})))
// starting from Q^0 = softmax(unary). When `tape` is given the
// intermediates are pushed under stage "meanfield".
CostVolume meanfield_forward(const CostVolume& unary_scores,
                             std::shared_ptr<const MessageFilters> filters,
                             const CrfParams& params,
                             GradientTape* tape = nullptr);

// Convenience overload that builds the filters for `image`.
CostVolume meanfield_forward(const CostVolume& unary_scores, const Image& image,
                             const CrfParams& params, GradientTape* tape,
                             FilterMethod method = FilterMethod::kLattice);

// Reverse pass over the record pushed by the matching forward call.
// Widths receive no gradient.
CrfGradients meanfield_backward(const CostVolume& grad_out, GradientTape& tape,
                                const CrfParams& params);

// Dense CRF energy of an integer labeling (O(N^2), diagnostics only):
//   E = sum_i -unary(i, x_i) + sum_{i<j} psi(i, j)
// where psi is the pair potential whose mean-field update is the forward
// pass above, symmetrized over (i, j):
//   psi = 1/2 [mu(x_i,x_j) k_ij(x_j) + mu(x_j,x_i) k_ji(x_i)],
//   k_ij(l) = w_app[l] K_app(i,j) s_app(i) + w_sp[l] K_sp(i,j) s_sp(i)
// with s the message normalizers (1 when normalization is off).
double compute_energy(const DisparityMap& labeling,
                      const CostVolume& unary_scores, const Image& image,
                      const CrfParams& params);

}  // namespace densestereo

#endif  // DENSESTEREO_MEANFIELD_H_
