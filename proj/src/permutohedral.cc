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

#include "densestereo/permutohedral.h"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "densestereo/errors.h"

namespace densestereo {

namespace {

using Key = std::array<int, PermutohedralLattice::kMaxDim>;

struct KeyHash {
  size_t operator()(const Key& k) const {
    size_t h = 0;
    for (int v : k) h = h * 2531011u + static_cast<size_t>(static_cast<unsigned>(v));
    return h;
  }
};

// Mass of the unit-height Gaussian, (2 pi)^(d/2), divided by the mass the
// splat-blur-slice chain assigns to a unit impulse. Lattice vertices form
// (d+1) A*_d with covolume (d+1)^(d-1/2) in the elevated hyperplane, which
// is an isometry of feature space scaled by `scale`; each of the d+1 blur
// passes doubles the mass.
double lattice_output_scale(int d, double scale) {
  double gauss_mass = std::pow(2 * std::numbers::pi, d / 2.0);
  double cell = std::pow(d + 1.0, d - 0.5) / std::pow(scale, d);
  return gauss_mass / (cell * std::pow(2.0, d + 1));
}

}  // namespace

PermutohedralLattice::PermutohedralLattice(const FeatureField& features)
    : points_(features.pixels()), dim_(features.dim()) {
  const int d = dim_;
  if (d > kMaxDim) {
    throw InvalidParameter("permutohedral lattice supports feature dim <= " +
                           std::to_string(kMaxDim) + ", got " +
                           std::to_string(d));
  }
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw NumericError("non-finite lattice feature");
  }

  offset_.resize(static_cast<size_t>(points_) * (d + 1));
  barycentric_.resize(static_cast<size_t>(points_) * (d + 1));

  // canonical[r * (d+1) + rank]: remainder-r vertex of the canonical simplex.
  std::vector<int> canonical((d + 1) * (d + 1));
  for (int r = 0; r <= d; ++r) {
    for (int j = 0; j <= d - r; ++j) canonical[r * (d + 1) + j] = r;
    for (int j = d - r + 1; j <= d; ++j) canonical[r * (d + 1) + j] = r - (d + 1);
  }

  const double inv_std_dev = std::sqrt(2.0 / 3.0) * (d + 1);
  std::vector<double> scale_factor(d);
  for (int i = 0; i < d; ++i) {
    scale_factor[i] = inv_std_dev / std::sqrt(static_cast<double>((i + 1) * (i + 2)));
  }
  output_scale_ = lattice_output_scale(d, inv_std_dev);

  std::unordered_map<Key, int, KeyHash> table;
  table.reserve(static_cast<size_t>(points_) * (d + 1));

  std::vector<double> elevated(d + 1), barycentric(d + 2);
  std::vector<int> rem0(d + 1), rank(d + 1);
  for (int k = 0; k < points_; ++k) {
    auto f = features.at(k);
    // Elevate onto the hyperplane sum(x) = 0.
    double sm = 0;
    for (int j = d; j > 0; --j) {
      double cf = f[j - 1] * scale_factor[j - 1];
      elevated[j] = sm - j * cf;
      sm += cf;
    }
    elevated[0] = sm;

    // Nearest remainder-0 point.
    int sum = 0;
    for (int i = 0; i <= d; ++i) {
      double v = elevated[i] / (d + 1);
      double up = std::ceil(v) * (d + 1);
      double down = std::floor(v) * (d + 1);
      rem0[i] = static_cast<int>(up - elevated[i] < elevated[i] - down ? up : down);
      sum += rem0[i] / (d + 1);
    }

    // Rank of each coordinate's residual; identifies the enclosing simplex.
    std::fill(rank.begin(), rank.end(), 0);
    for (int i = 0; i < d; ++i) {
      double di = elevated[i] - rem0[i];
      for (int j = i + 1; j <= d; ++j) {
        if (di < elevated[j] - rem0[j]) {
          ++rank[i];
        } else {
          ++rank[j];
        }
      }
    }
    for (int i = 0; i <= d; ++i) {
      rank[i] += sum;
      if (rank[i] < 0) {
        rank[i] += d + 1;
        rem0[i] += d + 1;
      } else if (rank[i] > d) {
        rank[i] -= d + 1;
        rem0[i] -= d + 1;
      }
    }

    std::fill(barycentric.begin(), barycentric.end(), 0.0);
    for (int i = 0; i <= d; ++i) {
      double v = (elevated[i] - rem0[i]) / (d + 1);
      barycentric[d - rank[i]] += v;
      barycentric[d - rank[i] + 1] -= v;
    }
    barycentric[0] += 1.0 + barycentric[d + 1];

    for (int r = 0; r <= d; ++r) {
      Key key{};
      for (int i = 0; i < d; ++i) key[i] = rem0[i] + canonical[r * (d + 1) + rank[i]];
      auto [it, inserted] = table.try_emplace(key, static_cast<int>(table.size()));
      if (inserted) keys_.insert(keys_.end(), key.begin(), key.begin() + d);
      offset_[static_cast<size_t>(k) * (d + 1) + r] = it->second;
      barycentric_[static_cast<size_t>(k) * (d + 1) + r] = barycentric[r];
    }
  }
  vertices_ = static_cast<int>(table.size());

  // Neighbours along each of the d+1 lattice directions. Moving "plus" along
  // axis j adds (d+1) e_j - 1 to the full (d+1)-coordinate key.
  neighbor_plus_.assign(static_cast<size_t>(d + 1) * vertices_, -1);
  neighbor_minus_.assign(static_cast<size_t>(d + 1) * vertices_, -1);
  for (int j = 0; j <= d; ++j) {
    for (int v = 0; v < vertices_; ++v) {
      const int* key = &keys_[static_cast<size_t>(v) * d];
      Key plus{}, minus{};
      for (int i = 0; i < d; ++i) {
        plus[i] = key[i] - 1;
        minus[i] = key[i] + 1;
      }
      if (j < d) {
        plus[j] = key[j] + d;
        minus[j] = key[j] - d;
      }
      if (auto it = table.find(plus); it != table.end()) {
        neighbor_plus_[static_cast<size_t>(j) * vertices_ + v] = it->second;
      }
      if (auto it = table.find(minus); it != table.end()) {
        neighbor_minus_[static_cast<size_t>(j) * vertices_ + v] = it->second;
      }
    }
  }

  compute_self_response();
}

void PermutohedralLattice::filter(std::span<const double> in,
                                  std::span<double> out, int channels,
                                  bool transpose) const {
  const int d = dim_;
  const size_t expected = static_cast<size_t>(points_) * channels;
  if (in.size() != expected || out.size() != expected) {
    throw ShapeError("lattice filter: buffer size does not match points * channels");
  }
  // Slot 0 is the absent neighbour and stays zero.
  std::vector<double> values(static_cast<size_t>(vertices_ + 1) * channels, 0.0);
  std::vector<double> next(values.size(), 0.0);

  for (int i = 0; i < points_; ++i) {
    const double* src = &in[static_cast<size_t>(i) * channels];
    for (int r = 0; r <= d; ++r) {
      size_t o = static_cast<size_t>(offset_[static_cast<size_t>(i) * (d + 1) + r] + 1) * channels;
      double w = barycentric_[static_cast<size_t>(i) * (d + 1) + r];
      for (int c = 0; c < channels; ++c) values[o + c] += w * src[c];
    }
  }

  for (int step = 0; step <= d; ++step) {
    int j = transpose ? d - step : step;
    const int* plus = &neighbor_plus_[static_cast<size_t>(j) * vertices_];
    const int* minus = &neighbor_minus_[static_cast<size_t>(j) * vertices_];
    for (int v = 0; v < vertices_; ++v) {
      const double* self = &values[static_cast<size_t>(v + 1) * channels];
      const double* a = &values[static_cast<size_t>(plus[v] + 1) * channels];
      const double* b = &values[static_cast<size_t>(minus[v] + 1) * channels];
      double* dst = &next[static_cast<size_t>(v + 1) * channels];
      for (int c = 0; c < channels; ++c) dst[c] = self[c] + 0.5 * (a[c] + b[c]);
    }
    std::swap(values, next);
  }

  for (int i = 0; i < points_; ++i) {
    double* dst = &out[static_cast<size_t>(i) * channels];
    for (int c = 0; c < channels; ++c) dst[c] = 0;
    for (int r = 0; r <= d; ++r) {
      size_t o = static_cast<size_t>(offset_[static_cast<size_t>(i) * (d + 1) + r] + 1) * channels;
      double w = barycentric_[static_cast<size_t>(i) * (d + 1) + r] * output_scale_;
      for (int c = 0; c < channels; ++c) dst[c] += w * values[o + c];
    }
  }
}

// For vertices a, b of one simplex the blur coefficient B(a, b) is a sum over
// step patterns n in {-1, 0, 1}^(d+1), one step per axis in blur order, with
// sum_j n_j ((d+1) e_j - 1) = a - b. Such patterns are n* + k * 1, so there
// are at most three; each contributes 0.5^(#moves) if every intermediate
// vertex exists.
void PermutohedralLattice::compute_self_response() {
  const int d = dim_;
  self_response_.assign(points_, 0.0);
  std::vector<int> delta(d + 1), steps(d + 1);

  auto coefficient = [&](int a, int b) {
    const int* ka = &keys_[static_cast<size_t>(a) * d];
    const int* kb = &keys_[static_cast<size_t>(b) * d];
    int last = 0;
    for (int i = 0; i < d; ++i) {
      delta[i] = ka[i] - kb[i];
      last -= delta[i];
    }
    delta[d] = last;
    double total = 0;
    for (int s = -(d + 1); s <= d + 1; ++s) {
      int sum = 0;
      bool ok = true;
      for (int i = 0; i <= d && ok; ++i) {
        int num = delta[i] + s;
        if (num % (d + 1) != 0) {
          ok = false;
          break;
        }
        steps[i] = num / (d + 1);
        if (steps[i] < -1 || steps[i] > 1) ok = false;
        sum += steps[i];
      }
      if (!ok || sum != s) continue;
      int at = b;
      double weight = 1;
      for (int j = 0; j <= d && at >= 0; ++j) {
        if (steps[j] == 1) {
          at = neighbor_plus_[static_cast<size_t>(j) * vertices_ + at];
          weight *= 0.5;
        } else if (steps[j] == -1) {
          at = neighbor_minus_[static_cast<size_t>(j) * vertices_ + at];
          weight *= 0.5;
        }
      }
      if (at == a) total += weight;
    }
    return total;
  };

  for (int i = 0; i < points_; ++i) {
    const int* verts = &offset_[static_cast<size_t>(i) * (d + 1)];
    const double* w = &barycentric_[static_cast<size_t>(i) * (d + 1)];
    double acc = 0;
    for (int ra = 0; ra <= d; ++ra) {
      for (int rb = 0; rb <= d; ++rb) {
        acc += w[ra] * w[rb] * coefficient(verts[ra], verts[rb]);
      }
    }
    self_response_[i] = acc * output_scale_;
  }
}

}  // namespace densestereo
