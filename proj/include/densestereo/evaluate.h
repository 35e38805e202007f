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


#ifndef DENSESTEREO_EVALUATE_H_
#define DENSESTEREO_EVALUATE_H_

#include <string>
#include <vector>

#include "densestereo/volume.h"

namespace densestereo {

struct ImageScore {
  std::string name;
  long valid = 0;
  long bad1 = 0;  // |pred - gt| > 1
  long bad3 = 0;  // |pred - gt| > 3
  double abs_error_sum = 0;
  double seconds = 0;

  double error1() const { return valid ? static_cast<double>(bad1) / valid : 0; }
  double error3() const { return valid ? static_cast<double>(bad3) / valid : 0; }
  double mae() const { return valid ? abs_error_sum / valid : 0; }
};

// Missing predictions count as wrong at every threshold.
ImageScore score_image(const DisparityMap& pred, const DisparityMap& gt,
                       const ValidityMask& mask);

struct EvalReport {
  std::vector<ImageScore> images;

  void add(ImageScore s) { images.push_back(std::move(s)); }
  // Valid-pixel weighted aggregates.
  long valid() const;
  double error1() const;
  double error3() const;
  double mae() const;
  std::string table() const;
};

// Single image report; throws EmptyMaskError when no pixel is valid.
EvalReport evaluate(const DisparityMap& pred, const DisparityMap& gt,
                    const ValidityMask& mask);

}  // namespace densestereo

#endif  // DENSESTEREO_EVALUATE_H_
