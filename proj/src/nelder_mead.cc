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


#include "densestereo/nelder_mead.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "densestereo/errors.h"

namespace densestereo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vertex {
  std::vector<double> z;  // log coordinates
  double f = kInf;
};

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> initial, const NelderMeadOptions& options) {
  const int n = static_cast<int>(initial.size());
  if (n < 1) throw InvalidParameter("nelder_mead: empty initial point");
  if (options.budget < n + 1) {
    throw InvalidParameter("nelder_mead: budget smaller than the initial simplex");
  }
  for (double v : initial) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw InvalidParameter("nelder_mead: initial point must be positive");
    }
  }

  NelderMeadResult result;
  std::vector<double> x(n);
  // The initial point is evaluated as given, not as exp(log(x)).
  auto evaluate = [&](const std::vector<double>& z, bool exact_initial = false) {
    for (int k = 0; k < n; ++k) x[k] = exact_initial ? initial[k] : std::exp(z[k]);
    double f = objective(x);
    if (!std::isfinite(f)) f = kInf;
    ++result.evaluations;
    // Strict improvement only, so ties keep the earlier point.
    if (result.best.empty() || f < result.best_value) {
      result.best = x;
      result.best_value = f;
    }
    result.history.push_back(result.best_value);
    return f;
  };
  auto budget_left = [&] { return result.evaluations < options.budget; };

  std::vector<Vertex> simplex(n + 1);
  for (int k = 0; k <= n; ++k) {
    simplex[k].z.resize(n);
    for (int j = 0; j < n; ++j) simplex[k].z[j] = std::log(initial[j]);
    if (k > 0) simplex[k].z[k - 1] += options.initial_step;
    simplex[k].f = evaluate(simplex[k].z, k == 0);
  }

  auto blend = [&](const std::vector<double>& c, const std::vector<double>& v,
                   double t) {
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) out[j] = c[j] + t * (v[j] - c[j]);
    return out;
  };

  while (budget_left()) {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    if (options.tolerance > 0) {
      double size = 0;
      for (int k = 1; k <= n; ++k) {
        for (int j = 0; j < n; ++j) {
          size = std::max(size, std::abs(simplex[k].z[j] - simplex[0].z[j]));
        }
      }
      if (size < options.tolerance) break;
    }
    std::vector<double> centroid(n, 0.0);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) centroid[j] += simplex[k].z[j] / n;
    }
    Vertex& worst = simplex[n];
    Vertex r{blend(centroid, worst.z, -options.reflect), 0};
    r.f = evaluate(r.z);
    if (r.f < simplex[0].f) {
      if (!budget_left()) {
        worst = std::move(r);
        break;
      }
      Vertex e{blend(centroid, worst.z, -options.reflect * options.expand), 0};
      e.f = evaluate(e.z);
      worst = e.f < r.f ? std::move(e) : std::move(r);
      continue;
    }
    if (r.f < simplex[n - 1].f) {
      worst = std::move(r);
      continue;
    }
    if (!budget_left()) break;
    // Outside contraction if the reflection beat the worst, else inside.
    const bool outside = r.f < worst.f;
    Vertex c{outside ? blend(centroid, r.z, options.contract)
                     : blend(centroid, worst.z, options.contract),
             0};
    c.f = evaluate(c.z);
    if (c.f < std::min(r.f, worst.f)) {
      worst = std::move(c);
      continue;
    }
    for (int k = 1; k <= n && budget_left(); ++k) {
      simplex[k].z = blend(simplex[0].z, simplex[k].z, options.shrink);
      simplex[k].f = evaluate(simplex[k].z);
    }
  }
  for (const Vertex& v : simplex) result.simplex.push_back(v.z);
  return result;
}

std::vector<double> CrfScalars::to_vector() const {
  return {theta_alpha, theta_beta, theta_gamma, w_appearance, w_spatial};
}

CrfScalars CrfScalars::from_vector(std::span<const double> v) {
  if (v.size() != 5) throw ShapeError("CrfScalars: need exactly 5 values");
  return {v[0], v[1], v[2], v[3], v[4]};
}

}  // namespace densestereo
