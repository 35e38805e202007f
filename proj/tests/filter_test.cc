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


#include <cmath>

#include "densestereo/features.h"
#include "densestereo/gaussian_filter.h"
#include "densestereo/permutohedral.h"
#include "densestereo/synthetic.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace densestereo {
namespace {

using testing::dot;
using testing::random_volume;
using testing::rel_l2;

constexpr KernelWidths kPaperWidths{18.65, 4.39, 2.13};

Image stereogram_image(int size, uint64_t seed) {
  StereogramOptions o;
  o.height = size;
  o.width = size;
  o.d_max = size / 4;
  o.shapes = 3;
  return make_stereogram(seed, o).left;
}

// Direct double loop over all pairs, independent of the filter code.
CostVolume direct_sum(const CostVolume& q, const FeatureField& f, bool exclude_self) {
  CostVolume out(q.height(), q.width(), q.labels());
  for (int i = 0; i < q.pixels(); ++i) {
    for (int j = 0; j < q.pixels(); ++j) {
      if (exclude_self && i == j) continue;
      double d2 = 0;
      for (int k = 0; k < f.dim(); ++k) {
        const double t = f.at(i)[k] - f.at(j)[k];
        d2 += t * t;
      }
      for (int l = 0; l < q.labels(); ++l) {
        out.pixel(i)[l] += std::exp(-0.5 * d2) * q.pixel(j)[l];
      }
    }
  }
  return out;
}

TEST(FeaturesTest, BilateralOrigin) {
  Image img(1, 1, 3, 0.0);
  FeatureField f = bilateral_features(img, {1, 1, 1});
  for (double v : f.at(0)) EXPECT_EQ(v, 0.0);
}

TEST(FeaturesTest, BilateralKernelAtOneWidth) {
  Image img(1, 20, 3, 100.0);
  KernelWidths w{7.0, 3.0, 1.0};
  FeatureField f = bilateral_features(img, w);
  EXPECT_NEAR(gaussian_kernel(f.at(0), f.at(7)), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(std::exp(-0.5), 0.60653, 1e-5);
  EXPECT_EQ(gaussian_kernel(f.at(3), f.at(3)), 1.0);
}

TEST(FeaturesTest, GrayscaleReplicated) {
  Image gray(1, 2, 1);
  gray.at(0, 1, 0) = 30;
  FeatureField f = bilateral_features(gray, {1, 10, 1});
  EXPECT_EQ(f.dim(), 5);
  for (int c = 2; c < 5; ++c) EXPECT_EQ(f.at(1)[c], 3.0);
}

TEST(FeaturesTest, NonPositiveWidthThrows) {
  Image img(2, 2, 3);
  EXPECT_THROW(bilateral_features(img, {0, 1, 1}), InvalidParameter);
  EXPECT_THROW(bilateral_features(img, {1, -1, 1}), InvalidParameter);
  EXPECT_THROW(spatial_features(2, 2, {1, 1, 0}), InvalidParameter);
}

TEST(FeaturesTest, SpatialKernelAtIntegerOffset) {
  FeatureField f = spatial_features(1, 8, kPaperWidths);
  const int offset = static_cast<int>(std::lround(2.13 * std::sqrt(2.0)));
  ASSERT_EQ(offset, 3);
  const double exact = std::exp(-offset * offset / (2 * 2.13 * 2.13));
  EXPECT_NEAR(gaussian_kernel(f.at(0), f.at(offset)), exact, 1e-15);
  EXPECT_NEAR(exact, std::exp(-1.0), 5e-3);
}

TEST(FeaturesTest, SpatialKernelLimitAndMonotonicity) {
  FeatureField wide = spatial_features(1, 2, {1, 1, 1e8});
  EXPECT_NEAR(gaussian_kernel(wide.at(0), wide.at(1)), 1.0, 1e-12);
  FeatureField a = spatial_features(1, 4, {1, 1, 2.13});
  FeatureField b = spatial_features(1, 4, {1, 1, 4.26});
  EXPECT_GT(gaussian_kernel(b.at(0), b.at(3)), gaussian_kernel(a.at(0), a.at(3)));
}

TEST(BruteForceTest, SinglePixelExcludeSelfIsZero) {
  CostVolume q = random_volume(1, 1, 3, 1);
  FeatureField f = spatial_features(1, 1, kPaperWidths);
  CostVolume out = gaussian_filter_bruteforce(q, f, true);
  for (double v : out.data()) EXPECT_EQ(v, 0.0);
}

TEST(BruteForceTest, IdenticalFeaturesSwap) {
  CostVolume q(1, 2, 2);
  q.pixel(0)[0] = 1.5;
  q.pixel(0)[1] = -2;
  q.pixel(1)[0] = 4;
  q.pixel(1)[1] = 0.25;
  FeatureField f(1, 2, 2);  // all-zero features, kernel 1
  CostVolume out = gaussian_filter_bruteforce(q, f, true);
  EXPECT_EQ(out.pixel(0)[0], 4);
  EXPECT_EQ(out.pixel(0)[1], 0.25);
  EXPECT_EQ(out.pixel(1)[0], 1.5);
  EXPECT_EQ(out.pixel(1)[1], -2);
}

TEST(BruteForceTest, UniformInputMatchesDirectSum) {
  CostVolume q(4, 4, 3);
  for (int i = 0; i < q.pixels(); ++i) {
    q.pixel(i)[0] = 0.2;
    q.pixel(i)[1] = 0.5;
    q.pixel(i)[2] = 0.3;
  }
  FeatureField f = bilateral_features(testing::random_image(4, 4, 5), {3, 40, 1});
  CostVolume got = gaussian_filter_bruteforce(q, f, true);
  CostVolume want = direct_sum(q, f, true);
  EXPECT_LT(testing::max_abs_diff(got.data(), want.data()), 1e-12);
  for (int i = 0; i < q.pixels(); ++i) {
    double mass = 0;
    for (int j = 0; j < q.pixels(); ++j) {
      if (j != i) mass += gaussian_kernel(f.at(i), f.at(j));
    }
    EXPECT_NEAR(got.pixel(i)[1], 0.5 * mass, 1e-12);
  }
}

TEST(BruteForceTest, Linear) {
  FeatureField f = bilateral_features(testing::random_image(5, 5, 2), kPaperWidths);
  CostVolume u = random_volume(5, 5, 3, 1), v = random_volume(5, 5, 3, 2);
  CostVolume mix(5, 5, 3);
  for (size_t k = 0; k < mix.size(); ++k) {
    mix.data()[k] = 2.5 * u.data()[k] - 0.75 * v.data()[k];
  }
  CostVolume fu = gaussian_filter_bruteforce(u, f, true);
  CostVolume fv = gaussian_filter_bruteforce(v, f, true);
  CostVolume fm = gaussian_filter_bruteforce(mix, f, true);
  for (size_t k = 0; k < mix.size(); ++k) {
    EXPECT_NEAR(fm.data()[k], 2.5 * fu.data()[k] - 0.75 * fv.data()[k], 1e-12);
  }
}

TEST(BruteForceTest, Adjoint) {
  FeatureField f = bilateral_features(testing::random_image(8, 8, 3), kPaperWidths);
  for (bool ex : {false, true}) {
    CostVolume u = random_volume(8, 8, 4, 5), v = random_volume(8, 8, 4, 6);
    const double lhs = dot(gaussian_filter_bruteforce(u, f, ex).data(), v.data());
    const double rhs = dot(u.data(), gaussian_filter_backward(v, f, ex,
                                                              FilterMethod::kBruteForce).data());
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-10);
  }
}

TEST(BruteForceTest, ZeroGradient) {
  FeatureField f = spatial_features(3, 3, kPaperWidths);
  CostVolume g(3, 3, 2);
  CostVolume grad = gaussian_filter_backward(g, f, true, FilterMethod::kBruteForce);
  for (double v : grad.data()) EXPECT_EQ(v, 0.0);
}

TEST(BruteForceTest, BackwardMatchesFiniteDifferences) {
  FeatureField f = bilateral_features(testing::random_image(6, 6, 9), kPaperWidths);
  CostVolume q = random_volume(6, 6, 4, 1);
  CostVolume g = random_volume(6, 6, 4, 2);
  auto loss = [&] { return dot(gaussian_filter_bruteforce(q, f, true).data(), g.data()); };
  auto numeric = testing::numeric_gradient(loss, q.data());
  CostVolume analytic = gaussian_filter_backward(g, f, true, FilterMethod::kBruteForce);
  EXPECT_LT(testing::worst_rel_err(analytic.data(), numeric), 1e-5);
}

TEST(BruteForceTest, ImpulseExcludesSelf) {
  FeatureField f = bilateral_features(testing::random_image(5, 5, 1), kPaperWidths);
  CostVolume q(5, 5, 1);
  q.pixel(12)[0] = 1;
  EXPECT_EQ(gaussian_filter_bruteforce(q, f, true).pixel(12)[0], 0.0);
}

TEST(BruteForceTest, ShapeMismatchThrows) {
  FeatureField f = spatial_features(3, 3, kPaperWidths);
  EXPECT_THROW(gaussian_filter_bruteforce(CostVolume(3, 4, 2), f, true), ShapeError);
  EXPECT_THROW(gaussian_filter_lattice(CostVolume(3, 4, 2), f, true), ShapeError);
}

TEST(LatticeTest, ConstantInputMatchesKernelMass2D) {
  FeatureField f = spatial_features(32, 32, kPaperWidths);
  CostVolume q(32, 32, 2, 0.5);
  EXPECT_LE(rel_l2(gaussian_filter_lattice(q, f, false).data(),
                   gaussian_filter_bruteforce(q, f, false).data()),
            5e-2);
}

TEST(LatticeTest, ConstantInputMatchesKernelMass5D) {
  FeatureField f = bilateral_features(stereogram_image(32, 3), kPaperWidths);
  CostVolume q(32, 32, 2, 0.5);
  EXPECT_LE(rel_l2(gaussian_filter_lattice(q, f, false).data(),
                   gaussian_filter_bruteforce(q, f, false).data()),
            5e-2);
}

TEST(LatticeTest, RandomInput2D) {
  FeatureField f = spatial_features(32, 32, kPaperWidths);
  CostVolume q = random_volume(32, 32, 3, 4, 0, 1);
  EXPECT_LE(rel_l2(gaussian_filter_lattice(q, f, true).data(),
                   gaussian_filter_bruteforce(q, f, true).data()),
            5e-2);
}

TEST(LatticeTest, RandomInput5D) {
  FeatureField f = bilateral_features(stereogram_image(32, 4), kPaperWidths);
  CostVolume q = random_volume(32, 32, 3, 4, 0, 1);
  EXPECT_LE(rel_l2(gaussian_filter_lattice(q, f, true).data(),
                   gaussian_filter_bruteforce(q, f, true).data()),
            5e-2);
}

TEST(LatticeTest, ImpulseDecaysAlongConstantColorScanline) {
  Image img(1, 40, 3, 120.0);
  FeatureField f = bilateral_features(img, kPaperWidths);
  CostVolume q(1, 40, 1);
  q.pixel(10)[0] = 1;
  CostVolume lat = gaussian_filter_lattice(q, f, false);
  CostVolume exact = gaussian_filter_bruteforce(q, f, false);
  for (const CostVolume* v : {&exact, &lat}) {
    for (int x = 11; x < 40; ++x) {
      EXPECT_LE(v->pixel(x)[0], v->pixel(x - 1)[0] + 1e-12) << "x=" << x;
    }
    for (int x = 9; x > 0; --x) {
      EXPECT_LE(v->pixel(x - 1)[0], v->pixel(x)[0] + 1e-12) << "x=" << x;
    }
  }
  EXPECT_GT(lat.pixel(20)[0], lat.pixel(39)[0]);
}

TEST(LatticeTest, ImpulseExcludesSelf) {
  FeatureField f = bilateral_features(stereogram_image(32, 5), kPaperWidths);
  for (int i : {0, 100, 555}) {
    CostVolume q(32, 32, 1);
    q.pixel(i)[0] = 1;
    EXPECT_NEAR(gaussian_filter_lattice(q, f, true).pixel(i)[0], 0.0, 1e-12);
  }
}

TEST(LatticeTest, TransposeIsExactAdjoint) {
  FeatureField f = bilateral_features(stereogram_image(32, 6), kPaperWidths);
  for (bool ex : {false, true}) {
    CostVolume u = random_volume(32, 32, 2, 7), v = random_volume(32, 32, 2, 8);
    const double lhs = dot(gaussian_filter_lattice(u, f, ex).data(), v.data());
    const double rhs =
        dot(u.data(), gaussian_filter_backward(v, f, ex, FilterMethod::kLattice).data());
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-10);
  }
}

TEST(LatticeTest, RejectsHighDimension) {
  FeatureField f(2, 2, 9);
  EXPECT_THROW(PermutohedralLattice lattice(f), InvalidParameter);
}

TEST(FilterMethodTest, ParseNames) {
  EXPECT_EQ(parse_filter_method("lattice"), FilterMethod::kLattice);
  EXPECT_EQ(parse_filter_method("bruteforce"), FilterMethod::kBruteForce);
  EXPECT_THROW(parse_filter_method("fft"), InvalidParameter);
}

}  // namespace
}  // namespace densestereo
