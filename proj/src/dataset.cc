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


#include "densestereo/dataset.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "densestereo/errors.h"
#include "densestereo/io.h"

namespace densestereo {

namespace fs = std::filesystem;

std::string sample_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d", index);
  return buf;
}

void save_sample(const std::string& dir, const std::string& name,
                 const StereoSample& sample) {
  fs::create_directories(dir);
  const fs::path base = fs::path(dir) / name;
  save_png_image(base.string() + "_left.png", sample.left);
  save_png_image(base.string() + "_right.png", sample.right);
  save_pfm(base.string() + "_disp_left.pfm", sample.gt_left);
  if (sample.gt_right) save_pfm(base.string() + "_disp_right.pfm", *sample.gt_right);
}

std::vector<NamedSample> load_dataset(const std::string& dir, int d_max,
                                      const MaskOptions& options) {
  if (!fs::is_directory(dir)) throw FormatError(dir + ": not a directory");
  const std::string suffix = "_left.png";
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string f = entry.path().filename().string();
    if (f.size() > suffix.size() &&
        f.compare(f.size() - suffix.size(), suffix.size(), suffix) == 0) {
      names.push_back(f.substr(0, f.size() - suffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  std::vector<NamedSample> out;
  for (const auto& name : names) {
    const std::string base = (fs::path(dir) / name).string();
    NamedSample ns{name, {}};
    StereoSample& s = ns.sample;
    s.left = load_png_image(base + "_left.png");
    s.right = load_png_image(base + "_right.png");
    s.gt_left = load_pfm_disparity(base + "_disp_left.pfm");
    if (fs::exists(base + "_disp_right.pfm")) {
      s.gt_right = load_pfm_disparity(base + "_disp_right.pfm");
    }
    if (s.right.height() != s.left.height() || s.right.width() != s.left.width() ||
        s.gt_left.height() != s.left.height() || s.gt_left.width() != s.left.width()) {
      throw FormatError(base + ": images and disparity differ in size");
    }
    s.mask = build_training_mask(s.gt_left, s.gt_right ? &*s.gt_right : nullptr,
                                 s.left, d_max, options);
    out.push_back(std::move(ns));
  }
  if (out.empty()) throw FormatError(dir + ": no *_left.png samples");
  return out;
}

std::vector<StereoSample> strip_names(std::vector<NamedSample> named) {
  std::vector<StereoSample> out;
  for (auto& n : named) out.push_back(std::move(n.sample));
  return out;
}

}  // namespace densestereo
