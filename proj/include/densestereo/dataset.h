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


#ifndef DENSESTEREO_DATASET_H_
#define DENSESTEREO_DATASET_H_

#include <string>
#include <vector>

#include "densestereo/losses.h"
#include "densestereo/sample.h"

namespace densestereo {

// Directory layout, NNNN = zero-padded index:
//   NNNN_left.png  NNNN_right.png  NNNN_disp_left.pfm  [NNNN_disp_right.pfm]
struct NamedSample {
  std::string name;
  StereoSample sample;
};

std::string sample_name(int index);

void save_sample(const std::string& dir, const std::string& name,
                 const StereoSample& sample);

// Samples in name order; masks rebuilt for d_max.
std::vector<NamedSample> load_dataset(const std::string& dir, int d_max,
                                      const MaskOptions& options = {});

std::vector<StereoSample> strip_names(std::vector<NamedSample> named);

}  // namespace densestereo

#endif  // DENSESTEREO_DATASET_H_
