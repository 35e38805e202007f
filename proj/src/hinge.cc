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


#include "densestereo/hinge.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "densestereo/adagrad.h"
#include "densestereo/errors.h"

namespace densestereo {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

HingeResult hinge_loss(const DescriptorField& left, const DescriptorField& right,
                       std::span<const HingePair> pairs, double margin) {
  if (pairs.empty()) throw EmptyMaskError("hinge_loss: empty pair set");
  if (!left.same_shape(right)) throw ShapeError("hinge_loss: fields differ");
  const int w = left.width();
  HingeResult r;
  r.grad_left = DescriptorField(left.height(), w, left.dim(), Side::kLeft);
  r.grad_right = DescriptorField(left.height(), w, left.dim(), Side::kRight);
  const double inv = 1.0 / pairs.size();
  for (const HingePair& hp : pairs) {
    if (hp.y < 0 || hp.y >= left.height() || hp.x < 0 || hp.x >= w ||
        hp.x - hp.d_pos < 0 || hp.x - hp.d_neg < 0 || hp.d_pos < 0 ||
        hp.d_neg < 0) {
      throw InvalidParameter("hinge_loss: pair outside the image");
    }
    const int p = hp.y * w + hp.x;
    const int qp = p - hp.d_pos, qn = p - hp.d_neg;
    const double s_pos = dot(left.at(p), right.at(qp));
    const double s_neg = dot(left.at(p), right.at(qn));
    const double h = margin + s_neg - s_pos;
    if (h <= 0) continue;
    r.loss += h * inv;
    ++r.active;
    auto gl = r.grad_left.at(p);
    auto grp = r.grad_right.at(qp);
    auto grn = r.grad_right.at(qn);
    auto lp = left.at(p);
    auto rp = right.at(qp);
    auto rn = right.at(qn);
    for (int c = 0; c < left.dim(); ++c) {
      gl[c] += inv * (rn[c] - rp[c]);
      grn[c] += inv * lp[c];
      grp[c] -= inv * lp[c];
    }
  }
  return r;
}

std::vector<HingePair> sample_hinge_pairs(const StereoSample& sample, int d_max,
                                          const HingeConfig& config,
                                          std::mt19937_64& rng) {
  const int h = sample.height(), w = sample.width();
  std::vector<int> candidates;
  for (int i = 0; i < h * w; ++i) {
    if (sample.mask[i] && !sample.gt_left.missing(i)) candidates.push_back(i);
  }
  std::vector<HingePair> pairs;
  if (candidates.empty()) return pairs;
  std::uniform_int_distribution<size_t> pick(0, candidates.size() - 1);
  std::uniform_int_distribution<int> offset(config.neg_min_offset,
                                            config.neg_max_offset);
  std::bernoulli_distribution sign(0.5);
  int attempts = 0;
  while (static_cast<int>(pairs.size()) < config.pairs_per_image &&
         attempts < 20 * config.pairs_per_image) {
    ++attempts;
    const int i = candidates[pick(rng)];
    const int y = i / w, x = i % w;
    const int d_pos = static_cast<int>(std::lround(sample.gt_left[i]));
    const int o = offset(rng);
    const int d_neg = sign(rng) ? d_pos + o : d_pos - o;
    if (d_pos < 0 || d_pos >= d_max || d_neg < 0 || d_neg >= d_max ||
        x - d_pos < 0 || x - d_neg < 0) {
      continue;
    }
    pairs.push_back({y, x, d_pos, d_neg});
  }
  return pairs;
}

SiameseNet hinge_pretrain(const SiameseNet& net,
                          std::span<const StereoSample> samples, int d_max,
                          const HingeConfig& config,
                          std::vector<double>* epoch_losses) {
  if (samples.empty()) throw EmptyMaskError("hinge_pretrain: no training samples");
  if (config.neg_min_offset < 1 || config.neg_max_offset < config.neg_min_offset) {
    throw InvalidParameter("hinge_pretrain: bad negative offset range");
  }
  SiameseNet out = net;
  Adagrad opt(config.learning_rate);
  std::mt19937_64 rng(config.seed);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double total = 0;
    int steps = 0;
    for (const StereoSample& sample : samples) {
      auto pairs = sample_hinge_pairs(sample, d_max, config, rng);
      if (pairs.empty()) continue;
      GradientTape tape;
      DescriptorField left = out.describe(sample.left, Side::kLeft, &tape);
      DescriptorField right = out.describe(sample.right, Side::kRight, &tape);
      HingeResult r = hinge_loss(left, right, pairs, config.margin);
      total += r.loss;
      ++steps;
      if (r.active == 0) continue;
      NetGradients g = out.backward(r.grad_right, tape);
      g.add(out.backward(r.grad_left, tape));
      opt.step(out.parameter_blocks(), g.blocks());
    }
    if (steps == 0) throw EmptyMaskError("hinge_pretrain: no sample yields pairs");
    if (epoch_losses) epoch_losses->push_back(total / steps);
  }
  return out;
}

}  // namespace densestereo
