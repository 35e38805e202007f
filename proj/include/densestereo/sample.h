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


#ifndef DENSESTEREO_SAMPLE_H_
#define DENSESTEREO_SAMPLE_H_

#include <optional>

#include "densestereo/volume.h"

namespace densestereo {

// One rectified pair with (possibly sparse) ground truth.
struct StereoSample {
  Image left;
  Image right;
  DisparityMap gt_left;
  std::optional<DisparityMap> gt_right;
  ValidityMask mask;

  int height() const { return left.height(); }
  int width() const { return left.width(); }
};

}  // namespace densestereo

#endif  // DENSESTEREO_SAMPLE_H_
