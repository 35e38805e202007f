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

#include "densestereo/gaussian_filter.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace densestereo {

FilterMethod parse_filter_method(std::string_view name) {
  if (name == "lattice") return FilterMethod::kLattice;
  if (name == "bruteforce") return FilterMethod::kBruteForce;
  throw InvalidParameter("unknown filter method '" + std::string(name) + "'");
}

std::string_view filter_method_name(FilterMethod method) {
  return method == FilterMethod::kLattice ? "lattice" : "bruteforce";
}

GaussianFilter::GaussianFilter(FilterMethod method, FeatureField features)
    : method_(method), features_(std::move(features)) {
  if (method_ == FilterMethod::kLattice) lattice_.emplace(features_);
}

void GaussianFilter::apply(std::span<const double> in, std::span<double> out,
                           int channels, bool exclude_self) const {
  if (method_ == FilterMethod::kBruteForce) {
    bruteforce(in, out, channels, exclude_self);
  } else {
    lattice(in, out, channels, exclude_self, false);
  }
}

void GaussianFilter::apply_transpose(std::span<const double> in,
                                     std::span<double> out, int channels,
                                     bool exclude_self) const {
  if (method_ == FilterMethod::kBruteForce) {
    bruteforce(in, out, channels, exclude_self);
  } else {
    lattice(in, out, channels, exclude_self, true);
  }
}

void GaussianFilter::bruteforce(std::span<const double> in,
                                std::span<double> out, int channels,
                                bool exclude_self) const {
  const int n = features_.pixels();
  const size_t expected = static_cast<size_t>(n) * channels;
  if (in.size() != expected || out.size() != expected) {
    throw ShapeError("gaussian filter: volume and feature field disagree on H x W");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < n; ++i) {
    double* oi = &out[static_cast<size_t>(i) * channels];
    const double* qi = &in[static_cast<size_t>(i) * channels];
    if (!exclude_self) {
      for (int c = 0; c < channels; ++c) oi[c] += qi[c];
    }
    auto fi = features_.at(i);
    for (int j = i + 1; j < n; ++j) {
      double k = gaussian_kernel(fi, features_.at(j));
      double* oj = &out[static_cast<size_t>(j) * channels];
      const double* qj = &in[static_cast<size_t>(j) * channels];
      for (int c = 0; c < channels; ++c) {
        oi[c] += k * qj[c];
        oj[c] += k * qi[c];
      }
    }
  }
}

void GaussianFilter::lattice(std::span<const double> in, std::span<double> out,
                             int channels, bool exclude_self,
                             bool transpose) const {
  lattice_->filter(in, out, channels, transpose);
  if (!exclude_self) return;
  auto diag = lattice_->self_response();
  for (int i = 0; i < features_.pixels(); ++i) {
    for (int c = 0; c < channels; ++c) {
      size_t k = static_cast<size_t>(i) * channels + c;
      out[k] -= diag[i] * in[k];
    }
  }
}

namespace {

CostVolume run_filter(const CostVolume& q, const FeatureField& features,
                      bool exclude_self, FilterMethod method, bool transpose) {
  if (q.height() != features.height() || q.width() != features.width()) {
    throw ShapeError("gaussian filter: volume and feature field disagree on H x W");
  }
  GaussianFilter filter(method, features);
  CostVolume out(q.height(), q.width(), q.labels());
  if (transpose) {
    filter.apply_transpose(q.data(), out.data(), q.labels(), exclude_self);
  } else {
    filter.apply(q.data(), out.data(), q.labels(), exclude_self);
  }
  return out;
}

}  // namespace

CostVolume gaussian_filter_bruteforce(const CostVolume& q,
                                      const FeatureField& features,
                                      bool exclude_self) {
  return run_filter(q, features, exclude_self, FilterMethod::kBruteForce, false);
}

CostVolume gaussian_filter_lattice(const CostVolume& q,
                                   const FeatureField& features,
                                   bool exclude_self) {
  return run_filter(q, features, exclude_self, FilterMethod::kLattice, false);
}

CostVolume gaussian_filter_backward(const CostVolume& grad_out,
                                    const FeatureField& features,
                                    bool exclude_self, FilterMethod method) {
  return run_filter(grad_out, features, exclude_self, method, true);
}

}  // namespace densestereo
