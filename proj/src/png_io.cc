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


#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "densestereo/errors.h"
#include "densestereo/io.h"

namespace densestereo {

namespace {

struct PngData {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<uint16_t> values;
};

struct FileCloser {
  void operator()(FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<FILE, FileCloser>;

PngData read_png(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw FormatError("cannot read " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           nullptr, nullptr);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  PngData out;
  std::vector<png_bytep> rows;
  std::vector<uint8_t> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path + ": not a readable PNG");
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && out.bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (out.bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = buffer.data() + stride * y;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  const size_t count = static_cast<size_t>(out.width) * out.height * out.channels;
  out.values.resize(count);
  if (out.bit_depth == 16) {
    for (int y = 0; y < out.height; ++y) {
      std::memcpy(&out.values[static_cast<size_t>(y) * out.width * out.channels],
                  rows[y], static_cast<size_t>(out.width) * out.channels * 2);
    }
  } else {
    for (int y = 0; y < out.height; ++y) {
      for (size_t k = 0; k < static_cast<size_t>(out.width) * out.channels; ++k) {
        out.values[static_cast<size_t>(y) * out.width * out.channels + k] = rows[y][k];
      }
    }
  }
  return out;
}

void write_png(const std::string& path, const PngData& d) {
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw FormatError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  const size_t stride = static_cast<size_t>(d.width) * d.channels * (d.bit_depth / 8);
  std::vector<uint8_t> buffer(stride * d.height);
  std::vector<png_bytep> rows(d.height);
  for (int y = 0; y < d.height; ++y) rows[y] = buffer.data() + stride * y;
  const size_t row_values = static_cast<size_t>(d.width) * d.channels;
  for (int y = 0; y < d.height; ++y) {
    for (size_t k = 0; k < row_values; ++k) {
      const uint16_t v = d.values[y * row_values + k];
      if (d.bit_depth == 16) {
        rows[y][2 * k] = static_cast<uint8_t>(v >> 8);
        rows[y][2 * k + 1] = static_cast<uint8_t>(v & 0xff);
      } else {
        rows[y][k] = static_cast<uint8_t>(v);
      }
    }
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("write failed: " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, d.width, d.height, d.bit_depth,
               d.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

uint16_t encode_kitti(double disparity) {
  if (DisparityMap::is_missing(disparity)) return 0;
  const double raw = std::round(disparity * 256.0);
  return static_cast<uint16_t>(std::clamp(raw, 1.0, 65535.0));
}

double decode_kitti(uint16_t raw) {
  return raw == 0 ? DisparityMap::kMissing : raw / 256.0;
}

DisparityMap load_kitti_disparity(const std::string& path) {
  PngData d = read_png(path);
  if (d.bit_depth != 16 || d.channels != 1) {
    throw FormatError(path + ": expected a 16-bit single-channel PNG, got " +
                      std::to_string(d.bit_depth) + "-bit with " +
                      std::to_string(d.channels) + " channel(s)");
  }
  DisparityMap map(d.height, d.width);
  for (int i = 0; i < map.pixels(); ++i) map.set(i, decode_kitti(d.values[i]));
  return map;
}

void save_kitti_disparity(const std::string& path, const DisparityMap& map) {
  PngData d{map.width(), map.height(), 1, 16, {}};
  d.values.resize(map.pixels());
  for (int i = 0; i < map.pixels(); ++i) d.values[i] = encode_kitti(map[i]);
  write_png(path, d);
}

Image load_png_image(const std::string& path) {
  PngData d = read_png(path);
  if (d.bit_depth != 8 || (d.channels != 1 && d.channels != 3)) {
    throw FormatError(path + ": expected an 8-bit gray or RGB PNG");
  }
  Image image(d.height, d.width, d.channels);
  auto out = image.data();
  for (size_t k = 0; k < d.values.size(); ++k) out[k] = d.values[k];
  return image;
}

void save_png_image(const std::string& path, const Image& image) {
  PngData d{image.width(), image.height(), image.channels(), 8, {}};
  for (double v : image.data()) {
    d.values.push_back(static_cast<uint16_t>(std::clamp(std::round(v), 0.0, 255.0)));
  }
  write_png(path, d);
}

}  // namespace densestereo
