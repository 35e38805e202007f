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


#include "densestereo/siamese.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "densestereo/errors.h"
#include "densestereo/parallel.h"

namespace densestereo {

namespace {

constexpr const char* kStage = "siamese";
constexpr char kMagic[8] = {'D', 'S', 'N', 'E', 'T', 'C', 'K', 'P'};
constexpr uint32_t kVersion = 1;
constexpr double kNormFloor = 1e-12;

struct SiameseRecord {
  int height = 0;
  int width = 0;
  std::vector<std::vector<double>> inputs;  // input of each layer, planar
  std::vector<double> output;               // last layer output, planar
  std::vector<double> norms;                // per pixel, when normalizing
};

// out[o] = bias[o] + sum_c w[o][c] * in[c], zero padded.
void conv_forward(const ConvLayer& layer, const std::vector<double>& in,
                  int h, int w, std::vector<double>& out) {
  const int n = h * w;
  const int k = layer.kernel;
  const int r = k / 2;
  out.assign(static_cast<size_t>(layer.out_channels) * n, 0.0);
  parallel_for(0, layer.out_channels, [&](int o) {
    double* dst = &out[static_cast<size_t>(o) * n];
    std::fill(dst, dst + n, layer.bias[o]);
    for (int c = 0; c < layer.in_channels; ++c) {
      const double* src = &in[static_cast<size_t>(c) * n];
      const double* wk =
          &layer.weights[(static_cast<size_t>(o) * layer.in_channels + c) * k * k];
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - r;
        const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - r;
          const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
          const double wv = wk[ky * k + kx];
          if (wv == 0) continue;
          for (int y = y0; y < y1; ++y) {
            double* drow = dst + static_cast<size_t>(y) * w;
            const double* srow = src + static_cast<size_t>(y + dy) * w + dx;
            for (int x = x0; x < x1; ++x) drow[x] += wv * srow[x];
          }
        }
      }
    }
  });
}

// Accumulates weight/bias gradients and, if grad_in is given, input gradient.
void conv_backward(const ConvLayer& layer, const std::vector<double>& in,
                   const std::vector<double>& grad_out, int h, int w,
                   std::vector<double>& grad_w, std::vector<double>& grad_b,
                   std::vector<double>* grad_in) {
  const int n = h * w;
  const int k = layer.kernel;
  const int r = k / 2;
  parallel_for(0, layer.out_channels, [&](int o) {
    const double* g = &grad_out[static_cast<size_t>(o) * n];
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += g[i];
    grad_b[o] += sum;
    for (int c = 0; c < layer.in_channels; ++c) {
      const double* src = &in[static_cast<size_t>(c) * n];
      const size_t base = (static_cast<size_t>(o) * layer.in_channels + c) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - r;
        const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - r;
          const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
          double acc = 0;
          for (int y = y0; y < y1; ++y) {
            const double* grow = g + static_cast<size_t>(y) * w;
            const double* srow = src + static_cast<size_t>(y + dy) * w + dx;
            for (int x = x0; x < x1; ++x) acc += grow[x] * srow[x];
          }
          grad_w[base + ky * k + kx] += acc;
        }
      }
    }
  });
  if (!grad_in) return;
  grad_in->assign(static_cast<size_t>(layer.in_channels) * n, 0.0);
  parallel_for(0, layer.in_channels, [&](int c) {
    double* gin = &(*grad_in)[static_cast<size_t>(c) * n];
    for (int o = 0; o < layer.out_channels; ++o) {
      const double* g = &grad_out[static_cast<size_t>(o) * n];
      const size_t base = (static_cast<size_t>(o) * layer.in_channels + c) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - r;
        const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - r;
          const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
          const double wv = layer.weights[base + ky * k + kx];
          if (wv == 0) continue;
          for (int y = y0; y < y1; ++y) {
            const double* grow = g + static_cast<size_t>(y) * w;
            double* girow = gin + static_cast<size_t>(y + dy) * w + dx;
            for (int x = x0; x < x1; ++x) girow[x] += wv * grow[x];
          }
        }
      }
    }
  });
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view bytes, size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) {
    throw FormatError("checkpoint: truncated at byte " + std::to_string(pos));
  }
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

DescriptorField::DescriptorField(int height, int width, int dim, Side side)
    : height_(height), width_(width), dim_(dim), side_(side) {
  if (height < 1 || width < 1 || dim < 1) {
    throw InvalidParameter("DescriptorField: dimensions must be >= 1");
  }
  values_.assign(static_cast<size_t>(height) * width * dim, 0.0);
}

void NetGradients::add(const NetGradients& other) {
  if (other.weights.size() != weights.size()) {
    throw ShapeError("NetGradients: layer count mismatch");
  }
  for (size_t l = 0; l < weights.size(); ++l) {
    for (size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += other.weights[l][i];
    for (size_t i = 0; i < bias[l].size(); ++i) bias[l][i] += other.bias[l][i];
  }
}

void NetGradients::scale(double s) {
  for (auto& v : weights) for (double& x : v) x *= s;
  for (auto& v : bias) for (double& x : v) x *= s;
}

std::vector<std::span<const double>> NetGradients::blocks() const {
  std::vector<std::span<const double>> out;
  for (size_t l = 0; l < weights.size(); ++l) {
    out.emplace_back(weights[l]);
    out.emplace_back(bias[l]);
  }
  return out;
}

std::vector<std::span<double>> SiameseNet::parameter_blocks() {
  std::vector<std::span<double>> out;
  for (auto& layer : layers_) {
    out.emplace_back(layer.weights);
    out.emplace_back(layer.bias);
  }
  return out;
}

SiameseNet SiameseNet::random(const SiameseConfig& config, uint64_t seed) {
  if (config.in_channels < 1 || config.channels.empty() || config.kernel < 1 ||
      config.kernel % 2 == 0) {
    throw InvalidParameter("SiameseConfig: need >= 1 layer and an odd kernel");
  }
  std::mt19937_64 rng(seed);
  SiameseNet net;
  net.standardize_input_ = config.standardize_input;
  net.normalize_output_ = config.normalize_output;
  int in = config.in_channels;
  for (int out : config.channels) {
    if (out < 1) throw InvalidParameter("SiameseConfig: channel width must be >= 1");
    ConvLayer layer;
    layer.in_channels = in;
    layer.out_channels = out;
    layer.kernel = config.kernel;
    std::normal_distribution<double> dist(
        0.0, std::sqrt(2.0 / (in * config.kernel * config.kernel)));
    layer.weights.resize(layer.weight_count());
    for (double& v : layer.weights) v = dist(rng);
    layer.bias.assign(out, 0.0);
    net.layers_.push_back(std::move(layer));
    in = out;
  }
  return net;
}

SiameseNet SiameseNet::identity(int channels) {
  SiameseNet net;
  net.standardize_input_ = false;
  net.normalize_output_ = false;
  ConvLayer layer;
  layer.in_channels = channels;
  layer.out_channels = channels;
  layer.kernel = 1;
  layer.weights.assign(layer.weight_count(), 0.0);
  for (int c = 0; c < channels; ++c) layer.weights[c * channels + c] = 1.0;
  layer.bias.assign(channels, 0.0);
  net.layers_.push_back(std::move(layer));
  return net;
}

int SiameseNet::in_channels() const {
  return layers_.empty() ? 0 : layers_.front().in_channels;
}

int SiameseNet::out_dim() const {
  return layers_.empty() ? 0 : layers_.back().out_channels;
}

std::vector<double> prepare_input(const Image& image, int channels,
                                  bool standardize) {
  const int n = image.pixels();
  std::vector<double> out(static_cast<size_t>(channels) * n);
  for (int i = 0; i < n; ++i) {
    const int y = i / image.width(), x = i % image.width();
    for (int c = 0; c < channels; ++c) {
      double v;
      if (image.channels() == channels) {
        v = image.at(y, x, c);
      } else if (image.channels() == 1) {
        v = image.at(y, x, 0);
      } else {
        v = (image.at(y, x, 0) + image.at(y, x, 1) + image.at(y, x, 2)) / 3.0;
      }
      out[static_cast<size_t>(c) * n + i] = v;
    }
  }
  if (standardize) {
    double mean = 0;
    for (double v : out) mean += v;
    mean /= out.size();
    double var = 0;
    for (double v : out) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / out.size());
    if (sd < 1e-6) sd = 1.0;
    for (double& v : out) v = (v - mean) / sd;
  }
  return out;
}

DescriptorField SiameseNet::describe(const Image& image, Side side,
                                     GradientTape* tape) const {
  if (layers_.empty()) throw InvalidParameter("SiameseNet: no layers");
  const int h = image.height(), w = image.width(), n = h * w;
  SiameseRecord rec;
  rec.height = h;
  rec.width = w;
  std::vector<double> act = prepare_input(image, in_channels(), standardize_input_);
  std::vector<double> next;
  for (size_t l = 0; l < layers_.size(); ++l) {
    conv_forward(layers_[l], act, h, w, next);
    if (tape) rec.inputs.push_back(std::move(act));
    if (l + 1 < layers_.size()) {
      for (double& v : next) v = v > 0 ? v : 0.0;
    }
    act = std::move(next);
  }
  const int dim = out_dim();
  DescriptorField field(h, w, dim, side);
  std::vector<double> norms;
  if (normalize_output_) norms.resize(n);
  for (int i = 0; i < n; ++i) {
    auto d = field.at(i);
    for (int c = 0; c < dim; ++c) d[c] = act[static_cast<size_t>(c) * n + i];
    if (normalize_output_) {
      double ss = 0;
      for (double v : d) ss += v * v;
      double norm = std::sqrt(ss + kNormFloor);
      norms[i] = norm;
      for (double& v : d) v /= norm;
    }
  }
  if (tape) {
    rec.output = std::move(act);
    rec.norms = std::move(norms);
    tape->push(kStage, std::move(rec));
  }
  return field;
}

NetGradients SiameseNet::zero_gradients() const {
  NetGradients g;
  for (const auto& layer : layers_) {
    g.weights.emplace_back(layer.weights.size(), 0.0);
    g.bias.emplace_back(layer.bias.size(), 0.0);
  }
  return g;
}

size_t SiameseNet::parameter_count() const {
  size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

NetGradients SiameseNet::backward(const DescriptorField& grad,
                                  GradientTape& tape) const {
  auto rec = tape.pop<SiameseRecord>(kStage);
  const int h = rec.height, w = rec.width, n = h * w;
  const int dim = out_dim();
  if (rec.inputs.size() != layers_.size() || grad.height() != h ||
      grad.width() != w || grad.dim() != dim) {
    throw TapeError("SiameseNet::backward: gradient or net does not match the tape");
  }
  std::vector<double> g(static_cast<size_t>(dim) * n);
  for (int i = 0; i < n; ++i) {
    auto gi = grad.at(i);
    if (normalize_output_) {
      // z = v / |v|: dv = (dz - z (z . dz)) / |v|
      const double norm = rec.norms[i];
      double dot = 0;
      for (int c = 0; c < dim; ++c) {
        dot += gi[c] * rec.output[static_cast<size_t>(c) * n + i] / norm;
      }
      for (int c = 0; c < dim; ++c) {
        const double z = rec.output[static_cast<size_t>(c) * n + i] / norm;
        g[static_cast<size_t>(c) * n + i] = (gi[c] - z * dot) / norm;
      }
    } else {
      for (int c = 0; c < dim; ++c) g[static_cast<size_t>(c) * n + i] = gi[c];
    }
  }
  NetGradients out = zero_gradients();
  std::vector<double> g_in;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const bool need_input = l > 0;
    conv_backward(layers_[l], rec.inputs[l], g, h, w, out.weights[l], out.bias[l],
                  need_input ? &g_in : nullptr);
    if (!need_input) break;
    // The input of layer l is relu(pre-activation); relu' from the stored value.
    const auto& in = rec.inputs[l];
    for (size_t k = 0; k < g_in.size(); ++k) {
      if (in[k] <= 0) g_in[k] = 0;
    }
    g = std::move(g_in);
  }
  return out;
}

std::string SiameseNet::serialize() const {
  std::string out(kMagic, sizeof(kMagic));
  put<uint32_t>(out, kVersion);
  put<uint32_t>(out, (standardize_input_ ? 1u : 0u) | (normalize_output_ ? 2u : 0u));
  put<uint32_t>(out, static_cast<uint32_t>(layers_.size()));
  for (const auto& layer : layers_) {
    put<uint32_t>(out, layer.in_channels);
    put<uint32_t>(out, layer.out_channels);
    put<uint32_t>(out, layer.kernel);
    for (double v : layer.weights) put<double>(out, v);
    for (double v : layer.bias) put<double>(out, v);
  }
  return out;
}

SiameseNet SiameseNet::deserialize(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("checkpoint: bad magic");
  }
  size_t pos = sizeof(kMagic);
  const uint32_t version = take<uint32_t>(bytes, pos);
  if (version != kVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  const uint32_t flags = take<uint32_t>(bytes, pos);
  const uint32_t count = take<uint32_t>(bytes, pos);
  if (count == 0 || count > 1024) throw FormatError("checkpoint: bad layer count");
  SiameseNet net;
  net.standardize_input_ = flags & 1u;
  net.normalize_output_ = flags & 2u;
  for (uint32_t l = 0; l < count; ++l) {
    ConvLayer layer;
    layer.in_channels = static_cast<int>(take<uint32_t>(bytes, pos));
    layer.out_channels = static_cast<int>(take<uint32_t>(bytes, pos));
    layer.kernel = static_cast<int>(take<uint32_t>(bytes, pos));
    if (layer.in_channels < 1 || layer.out_channels < 1 || layer.kernel < 1 ||
        layer.kernel % 2 == 0 || layer.in_channels > 4096 ||
        layer.out_channels > 4096 || layer.kernel > 63) {
      throw FormatError("checkpoint: bad shape for layer " + std::to_string(l));
    }
    if (l > 0 && layer.in_channels != net.layers_.back().out_channels) {
      throw FormatError("checkpoint: layer " + std::to_string(l) +
                        " does not chain with the previous layer");
    }
    layer.weights.resize(layer.weight_count());
    for (double& v : layer.weights) v = take<double>(bytes, pos);
    layer.bias.resize(layer.out_channels);
    for (double& v : layer.bias) v = take<double>(bytes, pos);
    net.layers_.push_back(std::move(layer));
  }
  if (pos != bytes.size()) throw FormatError("checkpoint: trailing bytes");
  return net;
}

void SiameseNet::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot write " + path);
  const std::string bytes = serialize();
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw FormatError("write failed: " + path);
}

SiameseNet SiameseNet::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return deserialize(ss.str());
}

}  // namespace densestereo
