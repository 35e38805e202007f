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


#include "densestereo/evaluate.h"

#include <cmath>
#include <cstdio>

#include "densestereo/errors.h"

namespace densestereo {

ImageScore score_image(const DisparityMap& pred, const DisparityMap& gt,
                       const ValidityMask& mask) {
  if (pred.height() != gt.height() || pred.width() != gt.width() ||
      mask.height() != gt.height() || mask.width() != gt.width()) {
    throw ShapeError("evaluate: prediction, ground truth and mask differ in H x W");
  }
  ImageScore s;
  for (int i = 0; i < gt.pixels(); ++i) {
    if (!mask[i] || gt.missing(i)) continue;
    ++s.valid;
    if (pred.missing(i)) {
      ++s.bad1;
      ++s.bad3;
      s.abs_error_sum += gt[i];
      continue;
    }
    const double e = std::abs(pred[i] - gt[i]);
    s.bad1 += e > 1.0;
    s.bad3 += e > 3.0;
    s.abs_error_sum += e;
  }
  return s;
}

long EvalReport::valid() const {
  long n = 0;
  for (const auto& s : images) n += s.valid;
  return n;
}

double EvalReport::error1() const {
  long bad = 0;
  for (const auto& s : images) bad += s.bad1;
  const long n = valid();
  return n ? static_cast<double>(bad) / n : 0;
}

double EvalReport::error3() const {
  long bad = 0;
  for (const auto& s : images) bad += s.bad3;
  const long n = valid();
  return n ? static_cast<double>(bad) / n : 0;
}

double EvalReport::mae() const {
  double sum = 0;
  for (const auto& s : images) sum += s.abs_error_sum;
  const long n = valid();
  return n ? sum / n : 0;
}

std::string EvalReport::table() const {
  std::string out = "name,valid,error_1px,error_3px,mae,seconds\n";
  char line[256];
  for (const auto& s : images) {
    std::snprintf(line, sizeof(line), "%s,%ld,%.6f,%.6f,%.6f,%.3f\n",
                  s.name.c_str(), s.valid, s.error1(), s.error3(), s.mae(),
                  s.seconds);
    out += line;
  }
  std::snprintf(line, sizeof(line), "ALL,%ld,%.6f,%.6f,%.6f,\n", valid(),
                error1(), error3(), mae());
  out += line;
  return out;
}

EvalReport evaluate(const DisparityMap& pred, const DisparityMap& gt,
                    const ValidityMask& mask) {
  ImageScore s = score_image(pred, gt, mask);
  if (s.valid == 0) throw EmptyMaskError("evaluate: no valid pixels");
  EvalReport r;
  r.add(std::move(s));
  return r;
}

}  // namespace densestereo
