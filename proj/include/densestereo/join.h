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


#ifndef DENSESTEREO_JOIN_H_
#define DENSESTEREO_JOIN_H_

#include "densestereo/siamese.h"
#include "densestereo/volume.h"

namespace densestereo {

// Score given to disparities whose right pixel falls off the image.
inline constexpr double kOutOfImageScore = -1e4;

// C(p, d) = <left(p), right(p - d)>.
CostVolume join_forward(const DescriptorField& left,
                        const DescriptorField& right, int d_max);

// dL/dleft(p) = sum_d grad(p, d) right(p - d).
DescriptorField join_backward_left(const CostVolume& grad_out,
                                   const DescriptorField& right);

// dL/dright(q) = sum_d grad(q + d, d) left(q + d).
DescriptorField join_backward_right(const CostVolume& grad_out,
                                    const DescriptorField& left);

}  // namespace densestereo

#endif  // DENSESTEREO_JOIN_H_
