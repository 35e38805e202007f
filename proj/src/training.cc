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


#include "densestereo/training.h"

#include <chrono>
#include <cstdio>

#include "densestereo/adagrad.h"
#include "densestereo/errors.h"
#include "densestereo/evaluate.h"

namespace densestereo {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::span<double>> weight_blocks(CrfParams& p) {
  return {p.w_appearance, p.w_spatial};
}

std::vector<std::span<const double>> weight_grad_blocks(const CrfGradients& g) {
  return {g.d_w_appearance, g.d_w_spatial};
}

}  // namespace

std::string epoch_log_header() { return "epoch,phase,mean_loss,error_3px,seconds"; }

std::string format_epoch_log(const EpochLog& log) {
  char line[160];
  std::snprintf(line, sizeof(line), "%d,%d,%.9g,%.6f,%.3f", log.epoch, log.phase,
                log.mean_loss, log.error3, log.seconds);
  return line;
}

StepResult training_step(const StereoModel& model, const StereoSample& sample,
                         const LossConfig& loss, bool train_net,
                         const CostVolume* cached_scores,
                         std::shared_ptr<const MessageFilters> filters) {
  GradientTape tape;
  CostVolume scores = cached_scores && !train_net
                          ? *cached_scores
                          : model.scores(sample.left, sample.right,
                                         train_net ? &tape : nullptr);
  if (!filters) filters = model.message_filters(sample.left);
  CostVolume q = meanfield_forward(scores, filters, model.crf, &tape);
  LossResult l = training_loss(q, sample.gt_left, sample.mask, loss);
  StepResult r;
  r.loss = l.loss;
  r.prediction = argmax_disparity(q);
  r.crf = meanfield_backward(l.grad, tape, model.crf);
  if (train_net) r.net = model.scores_backward(r.crf.d_unary, tape);
  return r;
}

std::vector<EpochLog> train_schedule(
    StereoModel& model, std::span<const StereoSample> samples,
    const TrainConfig& config,
    const std::function<void(const EpochLog&)>& on_epoch) {
  if (samples.empty()) throw EmptyMaskError("train_schedule: no training samples");
  if (config.phase1_epochs < 0 || config.phase2_epochs < 0) {
    throw InvalidParameter("train_schedule: negative epoch count");
  }
  // Widths stay fixed during gradient training, so the filters are reusable.
  std::vector<std::shared_ptr<const MessageFilters>> filters;
  for (const auto& s : samples) filters.push_back(model.message_filters(s.left));
  std::vector<CostVolume> frozen_scores;
  if (config.phase1_epochs > 0) {
    for (const auto& s : samples) frozen_scores.push_back(model.scores(s.left, s.right));
  }

  // The compatibility matrix acts on messages already scaled by the kernel
  // weights, so it gets its own, smaller step.
  Adagrad weight_opt(config.crf_learning_rate);
  Adagrad compat_opt(config.compat_learning_rate);
  Adagrad net_opt(config.net_learning_rate);
  std::vector<EpochLog> logs;
  const int total = config.phase1_epochs + config.phase2_epochs;
  for (int epoch = 1; epoch <= total; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool train_net = epoch > config.phase1_epochs;
    double loss_sum = 0;
    EvalReport report;
    for (size_t k = 0; k < samples.size(); ++k) {
      const StereoSample& s = samples[k];
      if (s.mask.count() == 0) continue;
      StepResult r = training_step(model, s, config.loss, train_net,
                                   train_net ? nullptr : &frozen_scores[k],
                                   filters[k]);
      loss_sum += r.loss;
      report.add(score_image(r.prediction, s.gt_left, s.mask));
      weight_opt.step(weight_blocks(model.crf), weight_grad_blocks(r.crf));
      compat_opt.step(model.crf.compatibility, r.crf.d_compatibility);
      if (train_net) net_opt.step(model.net.parameter_blocks(), r.net.blocks());
    }
    if (report.images.empty()) {
      throw EmptyMaskError("train_schedule: every sample has an empty mask");
    }
    EpochLog log{epoch, train_net ? 2 : 1, loss_sum / report.images.size(),
                 report.error3(), seconds_since(t0)};
    logs.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return logs;
}

void apply_scalars(CrfParams& params, const CrfScalars& s) {
  params.widths = KernelWidths{s.theta_alpha, s.theta_beta, s.theta_gamma};
  std::fill(params.w_appearance.begin(), params.w_appearance.end(), s.w_appearance);
  std::fill(params.w_spatial.begin(), params.w_spatial.end(), s.w_spatial);
}

CalibrationObjective::CalibrationObjective(const StereoModel& model,
                                           std::span<const StereoSample> samples)
    : model_(model) {
  if (samples.empty()) throw EmptyMaskError("calibrate: no samples");
  for (const auto& s : samples) {
    samples_.push_back(&s);
    scores_.push_back(model.scores(s.left, s.right));
  }
}

double CalibrationObjective::evaluate(const CrfScalars& scalars) const {
  StereoModel m = model_;
  apply_scalars(m.crf, scalars);
  EvalReport report;
  for (size_t k = 0; k < samples_.size(); ++k) {
    const StereoSample& s = *samples_[k];
    InferOptions opts;
    DisparityMap d = infer_from_scores(m, scores_[k], s.left, opts);
    report.add(score_image(d, s.gt_left, s.mask));
  }
  if (report.valid() == 0) throw EmptyMaskError("calibrate: no valid pixels");
  return report.error3();
}

double CalibrationObjective::operator()(std::span<const double> v) const {
  return evaluate(CrfScalars::from_vector(v));
}

NelderMeadResult calibrate(const StereoModel& model,
                           std::span<const StereoSample> samples,
                           const CrfScalars& initial, int budget) {
  CalibrationObjective objective(model, samples);
  NelderMeadOptions opts;
  opts.budget = budget;
  const auto x0 = initial.to_vector();
  return nelder_mead([&](std::span<const double> v) { return objective(v); }, x0,
                     opts);
}

}  // namespace densestereo
