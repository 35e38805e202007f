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

#ifndef DENSESTEREO_GAUSSIAN_FILTER_H_
#define DENSESTEREO_GAUSSIAN_FILTER_H_

#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "densestereo/features.h"
#include "densestereo/permutohedral.h"
#include "densestereo/volume.h"

namespace densestereo {

enum class FilterMethod { kBruteForce, kLattice };

FilterMethod parse_filter_method(std::string_view name);
std::string_view filter_method_name(FilterMethod method);

// Gaussian message passing bound to one feature field:
//   out(i, l) = sum_j k(f_i, f_j) in(j, l),  k = exp(-|f_i - f_j|^2 / 2),
// with j = i dropped when exclude_self is set. Construction may be costly
// (lattice build); apply() is const and thread-safe.
class GaussianFilter {
 public:
  GaussianFilter(FilterMethod method, FeatureField features);

  FilterMethod method() const { return method_; }
  const FeatureField& features() const { return features_; }
  int pixels() const { return features_.pixels(); }

  void apply(std::span<const double> in, std::span<double> out, int channels,
             bool exclude_self) const;
  // Adjoint of apply(). Identical for brute force (symmetric kernel); the
  // lattice runs its blur axes in reverse.
  void apply_transpose(std::span<const double> in, std::span<double> out,
                       int channels, bool exclude_self) const;

 private:
  void bruteforce(std::span<const double> in, std::span<double> out,
                  int channels, bool exclude_self) const;
  void lattice(std::span<const double> in, std::span<double> out, int channels,
               bool exclude_self, bool transpose) const;

  FilterMethod method_;
  FeatureField features_;
  std::optional<PermutohedralLattice> lattice_;
};

// Exact O(N^2 d) filtering; the oracle for everything else.
CostVolume gaussian_filter_bruteforce(const CostVolume& q,
                                      const FeatureField& features,
                                      bool exclude_self);

// Permutohedral approximation of gaussian_filter_bruteforce. With
// exclude_self the lattice's own diagonal response is subtracted.
CostVolume gaussian_filter_lattice(const CostVolume& q,
                                   const FeatureField& features,
                                   bool exclude_self);

// Adjoint of the forward filter with the same method and exclude_self.
CostVolume gaussian_filter_backward(const CostVolume& grad_out,
                                    const FeatureField& features,
                                    bool exclude_self, FilterMethod method);

}  // namespace densestereo

#endif  // DENSESTEREO_GAUSSIAN_FILTER_H_
