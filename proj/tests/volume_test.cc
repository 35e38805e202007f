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

#include "densestereo/tape.h"
#include "densestereo/volume.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace densestereo {
namespace {

using testing::numeric_gradient;
using testing::random_volume;
using testing::worst_rel_err;

CostVolume pixel_volume(std::vector<double> values) {
  CostVolume v(1, 1, static_cast<int>(values.size()));
  std::copy(values.begin(), values.end(), v.data().begin());
  return v;
}

TEST(ArgmaxTest, UniqueMaximum) {
  EXPECT_EQ(argmax_disparity(pixel_volume({0.1, 0.8, 0.1}))[0], 1);
}

TEST(ArgmaxTest, TieBreaksTowardSmallerIndex) {
  EXPECT_EQ(argmax_disparity(pixel_volume({0.5, 0.5, 0.2}))[0], 0);
}

TEST(ArgmaxTest, Minimum) {
  EXPECT_EQ(argmax_disparity(pixel_volume({3, 2, 9, 4}), Extremum::kMin)[0], 1);
}

TEST(SoftmaxTest, Uniform) {
  CostVolume s = softmax_over_disparities(pixel_volume({0, 0, 0}));
  for (double v : s.data()) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
  EXPECT_TRUE(s.normalized());
}

TEST(SoftmaxTest, ExactExponentials) {
  CostVolume s =
      softmax_over_disparities(pixel_volume({std::log(1.0), std::log(2.0), std::log(3.0)}));
  EXPECT_NEAR(s.data()[0], 1.0 / 6, 1e-15);
  EXPECT_NEAR(s.data()[1], 2.0 / 6, 1e-15);
  EXPECT_NEAR(s.data()[2], 3.0 / 6, 1e-15);
}

TEST(SoftmaxTest, LargeValuesStayFinite) {
  CostVolume s = softmax_over_disparities(pixel_volume({1000, 1000, 999}));
  EXPECT_TRUE(s.all_finite());
  EXPECT_EQ(s.data()[0], s.data()[1]);
}

TEST(SoftmaxTest, SumsToOneAndShiftInvariant) {
  CostVolume v = random_volume(4, 5, 7, 3, -5, 5);
  CostVolume s = softmax_over_disparities(v);
  CostVolume shifted = v;
  for (int i = 0; i < v.pixels(); ++i) {
    const double c = 0.37 * i - 2;
    for (double& x : shifted.pixel(i)) x += c;
  }
  CostVolume s2 = softmax_over_disparities(shifted);
  for (int i = 0; i < v.pixels(); ++i) {
    double sum = 0;
    for (double x : s.pixel(i)) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-6);
  }
  EXPECT_LT(testing::max_abs_diff(s.data(), s2.data()), 1e-6);
}

TEST(SoftmaxTest, PreservesArgmax) {
  CostVolume v = random_volume(6, 6, 9, 11, -3, 3);
  EXPECT_EQ(argmax_disparity(v), argmax_disparity(softmax_over_disparities(v)));
}

TEST(SoftmaxBackwardTest, ConstantGradientGivesZero) {
  CostVolume s = softmax_over_disparities(random_volume(2, 2, 4, 5));
  CostVolume g(2, 2, 4, 0.7);
  const CostVolume grad = softmax_backward(g, s);
  for (double v : grad.data()) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(SoftmaxBackwardTest, SaturatedGivesZero) {
  CostVolume s = softmax_over_disparities(pixel_volume({0, 60, 0}));
  CostVolume g = pixel_volume({0.3, -1.2, 2.0});
  const CostVolume grad = softmax_backward(g, s);
  for (double v : grad.data()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(SoftmaxBackwardTest, RequiresNormalizedInput) {
  CostVolume raw = random_volume(1, 1, 3, 1);
  EXPECT_THROW(softmax_backward(raw, raw), InvalidParameter);
}

TEST(SoftmaxBackwardTest, MatchesFiniteDifferences) {
  for (int d : {2, 5, 16}) {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      CostVolume x = random_volume(1, 1, d, seed, -2, 2);
      CostVolume g = random_volume(1, 1, d, seed + 100);
      CostVolume analytic = softmax_backward(g, softmax_over_disparities(x));
      auto loss = [&] {
        return testing::dot(softmax_over_disparities(x).data(), g.data());
      };
      auto numeric = numeric_gradient(loss, x.data());
      EXPECT_LT(worst_rel_err(analytic.data(), numeric), 1e-6) << "d=" << d;
    }
  }
}

TEST(DisparityMapTest, NegativeAndNonFiniteBecomeMissing) {
  DisparityMap m = DisparityMap::from_raw(1, 3, {-3.0, NAN, 2.5});
  EXPECT_TRUE(m.missing(0));
  EXPECT_TRUE(m.missing(1));
  EXPECT_EQ(m[0], DisparityMap::kMissing);
  EXPECT_EQ(m[2], 2.5);
}

TEST(ValidityMaskTest, FromDisparity) {
  DisparityMap m = DisparityMap::from_raw(1, 3, {-1.0, 0.0, 4.0});
  ValidityMask mask = ValidityMask::from_disparity(m);
  EXPECT_FALSE(mask[0]);
  EXPECT_TRUE(mask[1]);
  EXPECT_EQ(mask.count(), 2);
}

TEST(GradientTapeTest, PopsInReverseOrder) {
  GradientTape tape;
  tape.push("a", 1);
  tape.push("b", std::string("x"));
  EXPECT_THROW(tape.pop<int>("a"), TapeError);
  EXPECT_EQ(tape.pop<std::string>("b"), "x");
  EXPECT_THROW(tape.pop<double>("a"), TapeError);
  EXPECT_EQ(tape.pop<int>("a"), 1);
  EXPECT_THROW(tape.pop<int>("a"), TapeError);
}

TEST(ImageTest, RejectsBadShape) {
  EXPECT_THROW(Image(0, 3, 1), InvalidParameter);
  EXPECT_THROW(Image(2, 3, 2), InvalidParameter);
}

}  // namespace
}  // namespace densestereo
