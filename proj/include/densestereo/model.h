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


#ifndef DENSESTEREO_MODEL_H_
#define DENSESTEREO_MODEL_H_

#include <memory>
#include <optional>
#include <string>

#include "densestereo/gaussian_filter.h"
#include "densestereo/meanfield.h"
#include "densestereo/sample.h"
#include "densestereo/sgm.h"
#include "densestereo/siamese.h"
#include "densestereo/tape.h"

namespace densestereo {

// Siamese descriptors -> join volume -> mean-field CRF.
struct StereoModel {
  SiameseNet net;
  CrfParams crf;
  int d_max = 16;
  FilterMethod filter = FilterMethod::kLattice;

  static StereoModel create(const SiameseConfig& net_config, int d_max,
                            uint64_t seed);

  // Join volume of a pair. With a tape, pushes the net and join records.
  CostVolume scores(const Image& left, const Image& right,
                    GradientTape* tape = nullptr) const;
  // Gradient of the join volume back into the net weights.
  NetGradients scores_backward(const CostVolume& grad, GradientTape& tape) const;

  std::shared_ptr<const MessageFilters> message_filters(const Image& left) const;

  // Writes <prefix>.net and <prefix>.crf.
  void save(const std::string& prefix) const;
  static StereoModel load(const std::string& prefix);
};

struct InferOptions {
  std::optional<int> iterations;  // overrides crf.iterations
  PostMode post = PostMode::kNone;
  bool sgm = false;
  SgmConfig sgm_config;
};

struct Inference {
  CostVolume scores;          // join volume
  CostVolume q;               // CRF output (empty when iterations == 0)
  DisparityMap disparity;
};

// iterations == 0 skips the CRF: the result is the argmax of the join volume.
Inference infer(const StereoModel& model, const Image& left, const Image& right,
                const InferOptions& options = {});

// Disparity from a precomputed join volume, same rules as infer().
DisparityMap infer_from_scores(const StereoModel& model, const CostVolume& scores,
                               const Image& left, const InferOptions& options,
                               std::shared_ptr<const MessageFilters> filters = nullptr,
                               CostVolume* q_out = nullptr);

}  // namespace densestereo

#endif  // DENSESTEREO_MODEL_H_
