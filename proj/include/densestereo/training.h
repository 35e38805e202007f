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


#ifndef DENSESTEREO_TRAINING_H_
#define DENSESTEREO_TRAINING_H_

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "densestereo/losses.h"
#include "densestereo/model.h"
#include "densestereo/nelder_mead.h"

namespace densestereo {

struct TrainConfig {
  int phase1_epochs = 30;  // CRF only
  int phase2_epochs = 50;  // CRF and net
  double crf_learning_rate = 0.1;      // kernel weights
  double compat_learning_rate = 0.01;  // compatibility matrix
  double net_learning_rate = 0.003;
  LossConfig loss;
};

struct EpochLog {
  int epoch = 0;
  int phase = 0;
  double mean_loss = 0;
  double error3 = 0;
  double seconds = 0;
};

std::string epoch_log_header();
std::string format_epoch_log(const EpochLog& log);

// One pair per step, Adagrad per parameter group. `on_epoch` sees each
// finished epoch.
std::vector<EpochLog> train_schedule(
    StereoModel& model, std::span<const StereoSample> samples,
    const TrainConfig& config,
    const std::function<void(const EpochLog&)>& on_epoch = nullptr);

// Loss and gradients of one pair at the current parameters.
struct StepResult {
  double loss = 0;
  CrfGradients crf;
  NetGradients net;
  DisparityMap prediction;
};
StepResult training_step(const StereoModel& model, const StereoSample& sample,
                         const LossConfig& loss, bool train_net,
                         const CostVolume* cached_scores = nullptr,
                         std::shared_ptr<const MessageFilters> filters = nullptr);

// Applies the five scalars: widths, and constant per-label kernel weights.
void apply_scalars(CrfParams& params, const CrfScalars& scalars);

// Valid-pixel weighted 3-pixel error of the CRF argmax over `samples`,
// with join volumes computed once.
class CalibrationObjective {
 public:
  CalibrationObjective(const StereoModel& model,
                       std::span<const StereoSample> samples);
  double operator()(std::span<const double> scalars) const;
  double evaluate(const CrfScalars& scalars) const;

 private:
  StereoModel model_;
  std::vector<const StereoSample*> samples_;
  std::vector<CostVolume> scores_;
};

NelderMeadResult calibrate(const StereoModel& model,
                           std::span<const StereoSample> samples,
                           const CrfScalars& initial, int budget);

}  // namespace densestereo

#endif  // DENSESTEREO_TRAINING_H_
