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


#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "densestereo/errors.h"
#include "densestereo/io.h"

namespace densestereo {

namespace {

struct Raster {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> values;  // top-down, channel innermost
};

std::string read_token(std::istream& in, const std::string& path) {
  std::string token;
  if (!(in >> token)) throw FormatError(path + ": truncated PFM header");
  return token;
}

Raster read_pfm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot read " + path);
  Raster r;
  const std::string magic = read_token(f, path);
  if (magic == "Pf") {
    r.channels = 1;
  } else if (magic == "PF") {
    r.channels = 3;
  } else {
    throw FormatError(path + ": bad PFM magic '" + magic + "'");
  }
  double scale = 0;
  try {
    r.width = std::stoi(read_token(f, path));
    r.height = std::stoi(read_token(f, path));
    scale = std::stod(read_token(f, path));
  } catch (const std::logic_error&) {
    throw FormatError(path + ": malformed PFM header");
  }
  if (r.width < 1 || r.height < 1 || r.width > (1 << 16) || r.height > (1 << 16) ||
      scale == 0 || !std::isfinite(scale)) {
    throw FormatError(path + ": malformed PFM header");
  }
  f.get();  // single whitespace byte before the payload
  const bool little = scale < 0;
  const size_t count = static_cast<size_t>(r.width) * r.height * r.channels;
  std::vector<uint32_t> raw(count);
  f.read(reinterpret_cast<char*>(raw.data()),
         static_cast<std::streamsize>(count * sizeof(uint32_t)));
  if (static_cast<size_t>(f.gcount()) != count * sizeof(uint32_t)) {
    throw FormatError(path + ": truncated PFM payload");
  }
  const bool swap = little != (std::endian::native == std::endian::little);
  r.values.resize(count);
  const size_t row = static_cast<size_t>(r.width) * r.channels;
  for (int y = 0; y < r.height; ++y) {
    const size_t src = static_cast<size_t>(r.height - 1 - y) * row;
    for (size_t k = 0; k < row; ++k) {
      uint32_t v = raw[src + k];
      if (swap) v = __builtin_bswap32(v);
      std::memcpy(&r.values[static_cast<size_t>(y) * row + k], &v, sizeof(v));
    }
  }
  return r;
}

void write_pfm(const std::string& path, const Raster& r) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot write " + path);
  const bool little = std::endian::native == std::endian::little;
  f << (r.channels == 1 ? "Pf" : "PF") << '\n'
    << r.width << ' ' << r.height << '\n'
    << (little ? "-1.0" : "1.0") << '\n';
  const size_t row = static_cast<size_t>(r.width) * r.channels;
  for (int y = r.height - 1; y >= 0; --y) {
    f.write(reinterpret_cast<const char*>(&r.values[static_cast<size_t>(y) * row]),
            static_cast<std::streamsize>(row * sizeof(float)));
  }
  if (!f) throw FormatError("write failed: " + path);
}

DisparityMap to_disparity(const Raster& r) {
  DisparityMap map(r.height, r.width);
  for (size_t i = 0; i < r.values.size(); ++i) {
    const double v = r.values[i];
    if (std::isfinite(v)) map.set(static_cast<int>(i), v);
  }
  return map;
}

}  // namespace

std::variant<DisparityMap, Image> load_pfm(const std::string& path) {
  Raster r = read_pfm(path);
  if (r.channels == 1) return to_disparity(r);
  Image image(r.height, r.width, 3);
  auto d = image.data();
  for (size_t i = 0; i < r.values.size(); ++i) d[i] = r.values[i];
  return image;
}

DisparityMap load_pfm_disparity(const std::string& path) {
  auto v = load_pfm(path);
  if (!std::holds_alternative<DisparityMap>(v)) {
    throw FormatError(path + ": expected a single-channel PFM");
  }
  return std::get<DisparityMap>(std::move(v));
}

void save_pfm(const std::string& path, const DisparityMap& map) {
  Raster r{map.width(), map.height(), 1, {}};
  r.values.resize(map.pixels());
  for (int i = 0; i < map.pixels(); ++i) {
    r.values[i] = map.missing(i) ? std::numeric_limits<float>::infinity()
                                 : static_cast<float>(map[i]);
  }
  write_pfm(path, r);
}

void save_pfm(const std::string& path, const Image& image) {
  Image rgb = image.to_rgb();
  Raster r{rgb.width(), rgb.height(), 3, {}};
  for (double v : rgb.data()) r.values.push_back(static_cast<float>(v));
  write_pfm(path, r);
}

}  // namespace densestereo
