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


#ifndef DENSESTEREO_IO_H_
#define DENSESTEREO_IO_H_

#include <cstdint>
#include <string>
#include <variant>

#include "densestereo/volume.h"

namespace densestereo {

// PFM: "Pf" is one channel, "PF" three; a negative scale means
// little-endian; rows run bottom to top. Non-finite values load as missing.
std::variant<DisparityMap, Image> load_pfm(const std::string& path);
DisparityMap load_pfm_disparity(const std::string& path);
// Missing values are written as +inf.
void save_pfm(const std::string& path, const DisparityMap& map);
void save_pfm(const std::string& path, const Image& image);

// 16-bit single-channel PNG, raw = 256 d, raw 0 = missing.
DisparityMap load_kitti_disparity(const std::string& path);
void save_kitti_disparity(const std::string& path, const DisparityMap& map);
uint16_t encode_kitti(double disparity);
double decode_kitti(uint16_t raw);

// 8-bit gray or RGB PNG; values are clamped and rounded on save.
Image load_png_image(const std::string& path);
void save_png_image(const std::string& path, const Image& image);

}  // namespace densestereo

#endif  // DENSESTEREO_IO_H_
