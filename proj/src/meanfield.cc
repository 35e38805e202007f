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

#include "densestereo/meanfield.h"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "densestereo/parallel.h"

namespace densestereo {

namespace {

constexpr const char* kStage = "meanfield";

struct MeanFieldRecord {
  std::shared_ptr<const MessageFilters> filters;
  int height = 0;
  int width = 0;
  int labels = 0;
  std::vector<CostVolume> q;           // Q^0 .. Q^T
  std::vector<CostVolume> appearance;  // messages at iterations 1..T
  std::vector<CostVolume> spatial;
};

std::vector<double> inverse_mass(const GaussianFilter& filter, int pixels) {
  std::vector<double> ones(pixels, 1.0), mass(pixels);
  filter.apply(ones, mass, 1, false);
  for (double& m : mass) m = m > 0 ? 1.0 / m : 0.0;
  return mass;
}

}  // namespace

std::vector<double> init_compatibility(int labels) {
  if (labels < 1) throw InvalidParameter("init_compatibility: d_max must be >= 1");
  std::vector<double> mu(static_cast<size_t>(labels) * labels, 0.0);
  for (int i = 0; i < labels; ++i) {
    for (int j = 0; j < labels; ++j) {
      int gap = std::abs(i - j);
      if (gap <= 4) mu[static_cast<size_t>(i) * labels + j] = -1.0 + 0.2 * gap;
    }
  }
  return mu;
}

CrfParams CrfParams::defaults(int labels) {
  CrfParams p;
  p.widths = KernelWidths{18.65, 4.39, 2.13};
  p.w_appearance.assign(labels, 18.68);
  p.w_spatial.assign(labels, 68.68);
  p.compatibility = init_compatibility(labels);
  return p;
}

void CrfParams::validate() const {
  widths.validate();
  const size_t d = w_appearance.size();
  if (d == 0) throw InvalidParameter("CrfParams: no labels");
  if (w_spatial.size() != d || compatibility.size() != d * d) {
    throw ShapeError("CrfParams: weight and compatibility sizes disagree");
  }
  if (iterations < 0) throw InvalidParameter("CrfParams: negative iteration count");
  for (const auto* v : {&w_appearance, &w_spatial, &compatibility}) {
    for (double x : *v) {
      if (!std::isfinite(x)) throw InvalidParameter("CrfParams: non-finite entry");
    }
  }
}

KeyValueFile CrfParams::to_keyvalue() const {
  KeyValueFile kv;
  kv.set_double("theta_alpha", widths.theta_alpha);
  kv.set_double("theta_beta", widths.theta_beta);
  kv.set_double("theta_gamma", widths.theta_gamma);
  kv.set_int("iterations", iterations);
  kv.set_int("normalize_messages", normalize_messages ? 1 : 0);
  kv.set_int("labels", labels());
  kv.set_doubles("w_appearance", w_appearance);
  kv.set_doubles("w_spatial", w_spatial);
  const int d = labels();
  for (int r = 0; r < d; ++r) {
    kv.set_doubles("compatibility[" + std::to_string(r) + "]",
                   std::span<const double>(compatibility).subspan(
                       static_cast<size_t>(r) * d, d));
  }
  return kv;
}

CrfParams CrfParams::from_keyvalue(const KeyValueFile& kv) {
  CrfParams p;
  p.widths.theta_alpha = kv.get_double("theta_alpha");
  p.widths.theta_beta = kv.get_double("theta_beta");
  p.widths.theta_gamma = kv.get_double("theta_gamma");
  p.iterations = static_cast<int>(kv.get_int("iterations"));
  if (kv.has("normalize_messages")) {
    p.normalize_messages = kv.get_int("normalize_messages") != 0;
  }
  p.w_appearance = kv.get_doubles("w_appearance");
  p.w_spatial = kv.get_doubles("w_spatial");
  const int d = p.labels();
  if (kv.has("labels") && kv.get_int("labels") != d) {
    throw FormatError("CrfParams: 'labels' disagrees with w_appearance length");
  }
  for (int r = 0; r < d; ++r) {
    auto row = kv.get_doubles("compatibility[" + std::to_string(r) + "]");
    if (static_cast<int>(row.size()) != d) {
      throw FormatError("CrfParams: compatibility row " + std::to_string(r) +
                        " has " + std::to_string(row.size()) + " entries");
    }
    p.compatibility.insert(p.compatibility.end(), row.begin(), row.end());
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return p;
}

void CrfParams::save(const std::string& path) const { to_keyvalue().save(path); }

CrfParams CrfParams::load(const std::string& path) {
  return from_keyvalue(KeyValueFile::load(path));
}

MessageFilters::MessageFilters(const Image& image, const KernelWidths& widths,
                               FilterMethod method, bool normalize)
    : height_(image.height()),
      width_(image.width()),
      widths_(widths),
      method_(method),
      normalize_(normalize),
      appearance_(method, bilateral_features(image, widths)),
      spatial_(method, spatial_features(image.height(), image.width(), widths)) {
  const int n = image.pixels();
  if (normalize_) {
    appearance_scale_ = inverse_mass(appearance_, n);
    spatial_scale_ = inverse_mass(spatial_, n);
  } else {
    appearance_scale_.assign(n, 1.0);
    spatial_scale_.assign(n, 1.0);
  }
}

void MessageFilters::messages(const CostVolume& q, CostVolume& appearance,
                              CostVolume& spatial) const {
  const int labels = q.labels();
  appearance_.apply(q.data(), appearance.data(), labels, true);
  spatial_.apply(q.data(), spatial.data(), labels, true);
  if (!normalize_) return;
  for (int i = 0; i < q.pixels(); ++i) {
    for (double& v : appearance.pixel(i)) v *= appearance_scale_[i];
    for (double& v : spatial.pixel(i)) v *= spatial_scale_[i];
  }
}

void MessageFilters::messages_transpose(const CostVolume& g_appearance,
                                        const CostVolume& g_spatial,
                                        CostVolume& grad_q) const {
  const int labels = grad_q.labels();
  CostVolume scaled = g_appearance;
  if (normalize_) {
    for (int i = 0; i < scaled.pixels(); ++i) {
      for (double& v : scaled.pixel(i)) v *= appearance_scale_[i];
    }
  }
  CostVolume tmp(grad_q.height(), grad_q.width(), labels);
  appearance_.apply_transpose(scaled.data(), tmp.data(), labels, true);
  for (size_t k = 0; k < tmp.size(); ++k) grad_q.data()[k] += tmp.data()[k];

  scaled = g_spatial;
  if (normalize_) {
    for (int i = 0; i < scaled.pixels(); ++i) {
      for (double& v : scaled.pixel(i)) v *= spatial_scale_[i];
    }
  }
  spatial_.apply_transpose(scaled.data(), tmp.data(), labels, true);
  for (size_t k = 0; k < tmp.size(); ++k) grad_q.data()[k] += tmp.data()[k];
}

CostVolume meanfield_forward(const CostVolume& unary_scores,
                             std::shared_ptr<const MessageFilters> filters,
                             const CrfParams& params, GradientTape* tape) {
  params.validate();
  const int d = unary_scores.labels();
  if (params.labels() != d) {
    throw ShapeError("meanfield_forward: CrfParams has " +
                     std::to_string(params.labels()) + " labels, volume has " +
                     std::to_string(d));
  }
  if (filters->height() != unary_scores.height() ||
      filters->width() != unary_scores.width()) {
    throw ShapeError("meanfield_forward: image and cost volume differ in H x W");
  }
  if (!unary_scores.all_finite()) {
    throw NumericError("meanfield_forward: non-finite unary scores");
  }

  MeanFieldRecord rec;
  rec.filters = filters;
  rec.height = unary_scores.height();
  rec.width = unary_scores.width();
  rec.labels = d;

  CostVolume q = softmax_over_disparities(unary_scores);
  CostVolume app(rec.height, rec.width, d), sp(rec.height, rec.width, d);
  const int w = rec.width;
  for (int t = 1; t <= params.iterations; ++t) {
    filters->messages(q, app, sp);
    CostVolume next(rec.height, rec.width, d);
    parallel_for(0, rec.height, [&](int y) {
      std::vector<double> weighted(d);
      for (int i = y * w; i < (y + 1) * w; ++i) {
        auto a = app.pixel(i);
        auto s = sp.pixel(i);
        auto u = unary_scores.pixel(i);
        auto out = next.pixel(i);
        for (int l = 0; l < d; ++l) {
          weighted[l] = params.w_appearance[l] * a[l] + params.w_spatial[l] * s[l];
        }
        for (int l = 0; l < d; ++l) {
          const double* mu_row = &params.compatibility[static_cast<size_t>(l) * d];
          double pairwise = 0;
          for (int lp = 0; lp < d; ++lp) pairwise += mu_row[lp] * weighted[lp];
          out[l] = u[l] - pairwise;
        }
        softmax_inplace(out);
      }
    });
    next.set_normalized(true);
    if (!next.all_finite()) {
      throw NumericError("meanfield_forward: non-finite values at iteration " +
                         std::to_string(t));
    }
    if (tape) {
      rec.q.push_back(std::move(q));
      rec.appearance.push_back(app);
      rec.spatial.push_back(sp);
    }
    q = std::move(next);
  }
  if (tape) {
    rec.q.push_back(q);
    tape->push(kStage, std::move(rec));
  }
  return q;
}

CostVolume meanfield_forward(const CostVolume& unary_scores, const Image& image,
                             const CrfParams& params, GradientTape* tape,
                             FilterMethod method) {
  auto filters = std::make_shared<const MessageFilters>(
      image, params.widths, method, params.normalize_messages);
  return meanfield_forward(unary_scores, std::move(filters), params, tape);
}

CrfGradients meanfield_backward(const CostVolume& grad_out, GradientTape& tape,
                                const CrfParams& params) {
  auto rec = tape.pop<MeanFieldRecord>(kStage);
  const int d = rec.labels;
  const int iterations = static_cast<int>(rec.appearance.size());
  if (params.labels() != d || params.iterations != iterations) {
    throw TapeError("meanfield_backward: params do not match the recorded forward pass");
  }
  if (grad_out.height() != rec.height || grad_out.width() != rec.width ||
      grad_out.labels() != d) {
    throw TapeError("meanfield_backward: gradient shape does not match the tape");
  }

  CrfGradients g;
  g.d_unary = CostVolume(rec.height, rec.width, d);
  g.d_w_appearance.assign(d, 0.0);
  g.d_w_spatial.assign(d, 0.0);
  g.d_compatibility.assign(static_cast<size_t>(d) * d, 0.0);

  CostVolume grad_q = grad_out;
  std::vector<double> grad_s(d), weighted(d), grad_weighted(d);
  for (int t = iterations; t >= 1; --t) {
    const CostVolume& q_out = rec.q[t];
    const CostVolume& app = rec.appearance[t - 1];
    const CostVolume& sp = rec.spatial[t - 1];
    CostVolume g_app(rec.height, rec.width, d), g_sp(rec.height, rec.width, d);
    for (int i = 0; i < q_out.pixels(); ++i) {
      softmax_backward_pixel(grad_q.pixel(i), q_out.pixel(i), grad_s);
      auto du = g.d_unary.pixel(i);
      auto a = app.pixel(i);
      auto s = sp.pixel(i);
      for (int l = 0; l < d; ++l) {
        du[l] += grad_s[l];
        weighted[l] = params.w_appearance[l] * a[l] + params.w_spatial[l] * s[l];
        grad_weighted[l] = 0;
      }
      // pairwise = mu * weighted enters with a minus sign.
      for (int l = 0; l < d; ++l) {
        const double gp = -grad_s[l];
        if (gp == 0) continue;
        const double* mu_row = &params.compatibility[static_cast<size_t>(l) * d];
        double* dmu_row = &g.d_compatibility[static_cast<size_t>(l) * d];
        for (int lp = 0; lp < d; ++lp) {
          dmu_row[lp] += gp * weighted[lp];
          grad_weighted[lp] += mu_row[lp] * gp;
        }
      }
      auto ga = g_app.pixel(i);
      auto gs = g_sp.pixel(i);
      for (int l = 0; l < d; ++l) {
        g.d_w_appearance[l] += grad_weighted[l] * a[l];
        g.d_w_spatial[l] += grad_weighted[l] * s[l];
        ga[l] = params.w_appearance[l] * grad_weighted[l];
        gs[l] = params.w_spatial[l] * grad_weighted[l];
      }
    }
    CostVolume prev(rec.height, rec.width, d);
    rec.filters->messages_transpose(g_app, g_sp, prev);
    grad_q = std::move(prev);
  }
  // Q^0 = softmax(unary).
  for (int i = 0; i < grad_q.pixels(); ++i) {
    softmax_backward_pixel(grad_q.pixel(i), rec.q[0].pixel(i), grad_s);
    auto du = g.d_unary.pixel(i);
    for (int l = 0; l < d; ++l) du[l] += grad_s[l];
  }
  return g;
}

double compute_energy(const DisparityMap& labeling,
                      const CostVolume& unary_scores, const Image& image,
                      const CrfParams& params) {
  params.validate();
  const int d = unary_scores.labels();
  if (params.labels() != d) throw ShapeError("compute_energy: label count mismatch");
  if (labeling.height() != unary_scores.height() ||
      labeling.width() != unary_scores.width() ||
      image.height() != unary_scores.height() ||
      image.width() != unary_scores.width()) {
    throw ShapeError("compute_energy: shapes disagree");
  }
  const int n = unary_scores.pixels();
  std::vector<int> x(n);
  for (int i = 0; i < n; ++i) {
    double v = labeling[i];
    if (labeling.missing(i) || v != std::floor(v) || v >= d) {
      throw InvalidParameter("compute_energy: label out of range at pixel " +
                             std::to_string(i));
    }
    x[i] = static_cast<int>(v);
  }
  MessageFilters filters(image, params.widths, FilterMethod::kBruteForce,
                         params.normalize_messages);
  const FeatureField& fa = filters.appearance_filter().features();
  const FeatureField& fs = filters.spatial_filter().features();
  auto sa = filters.appearance_scale();
  auto ss = filters.spatial_scale();

  double energy = 0;
  for (int i = 0; i < n; ++i) energy -= unary_scores.pixel(i)[x[i]];
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double ka = gaussian_kernel(fa.at(i), fa.at(j));
      double ks = gaussian_kernel(fs.at(i), fs.at(j));
      double k_ij = params.w_appearance[x[j]] * ka * sa[i] +
                    params.w_spatial[x[j]] * ks * ss[i];
      double k_ji = params.w_appearance[x[i]] * ka * sa[j] +
                    params.w_spatial[x[i]] * ks * ss[j];
      energy += 0.5 * (params.mu(x[i], x[j]) * k_ij + params.mu(x[j], x[i]) * k_ji);
    }
  }
  return energy;
}

}  // namespace densestereo
