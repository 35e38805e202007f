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


#ifndef DENSESTEREO_NELDER_MEAD_H_
#define DENSESTEREO_NELDER_MEAD_H_

#include <functional>
#include <span>
#include <vector>

namespace densestereo {

struct NelderMeadOptions {
  int budget = 300;            // objective evaluations
  double initial_step = 0.05;  // additive step in log space per axis
  double reflect = 1.0;
  double expand = 2.0;
  double contract = 0.5;
  double shrink = 0.5;
  double tolerance = 0.0;      // stop early when the simplex is this small
};

struct NelderMeadResult {
  std::vector<double> best;    // positive-domain coordinates
  double best_value = 0;
  int evaluations = 0;
  std::vector<double> history; // best value after each evaluation
  std::vector<std::vector<double>> simplex;  // final vertices, log space
};

// Downhill simplex on log(x). Non-finite objective values count as +inf.
NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> initial, const NelderMeadOptions& options = {});

// The five calibrated scalars, in the order used by nelder_mead.
struct CrfScalars {
  double theta_alpha = 18.65;
  double theta_beta = 4.39;
  double theta_gamma = 2.13;
  double w_appearance = 18.68;
  double w_spatial = 68.68;

  std::vector<double> to_vector() const;
  static CrfScalars from_vector(std::span<const double> v);
};

}  // namespace densestereo

#endif  // DENSESTEREO_NELDER_MEAD_H_
