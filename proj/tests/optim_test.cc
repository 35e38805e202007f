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
#include <limits>

#include "densestereo/adagrad.h"
#include "densestereo/model.h"
#include "densestereo/nelder_mead.h"
#include "densestereo/synthetic.h"
#include "densestereo/training.h"
#include "gtest/gtest.h"

namespace densestereo {
namespace {

// Rank of a set of row vectors by Gaussian elimination with pivoting.
int matrix_rank(std::vector<std::vector<double>> rows, double tol = 1e-9) {
  int rank = 0;
  const int cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  for (int c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    int pivot = rank;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r) {
      if (std::abs(rows[r][c]) > std::abs(rows[pivot][c])) pivot = r;
    }
    if (std::abs(rows[pivot][c]) < tol) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = rank + 1; r < static_cast<int>(rows.size()); ++r) {
      const double f = rows[r][c] / rows[rank][c];
      for (int k = c; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

int simplex_rank(const std::vector<std::vector<double>>& simplex) {
  std::vector<std::vector<double>> edges;
  for (size_t v = 1; v < simplex.size(); ++v) {
    std::vector<double> e(simplex[v].size());
    double len = 0;
    for (size_t k = 0; k < e.size(); ++k) {
      e[k] = simplex[v][k] - simplex[0][k];
      len += e[k] * e[k];
    }
    if (len > 0) {
      for (double& x : e) x /= std::sqrt(len);
    }
    edges.push_back(e);
  }
  return matrix_rank(edges);
}

TEST(AdagradTest, FirstStepIsLearningRate) {
  Adagrad opt(0.1);
  std::vector<double> p = {2.0, -1.0};
  std::vector<double> g = {1.0, -3.0};
  opt.step(p, g);
  EXPECT_DOUBLE_EQ(p[0], 2.0 - 0.1 / (1 + 1e-8));
  EXPECT_DOUBLE_EQ(p[1], -1.0 + 0.1 * 3 / (3 + 1e-8));
  EXPECT_NEAR(std::abs(p[0] - 2.0), 0.1, 1e-8);
}

TEST(AdagradTest, ZeroGradientChangesNothing) {
  Adagrad opt(0.1);
  std::vector<double> p = {1.5}, g = {0.0};
  opt.step(p, g);
  EXPECT_EQ(p[0], 1.5);
  EXPECT_EQ(opt.accumulators()[0][0], 0.0);
}

TEST(AdagradTest, StepDecaysAsInverseSqrt) {
  Adagrad opt(0.1);
  std::vector<double> p = {0.0}, g = {0.7};
  double prev = 0;
  for (int k = 1; k <= 50; ++k) {
    prev = p[0];
    opt.step(p, g);
    const double want = 0.1 * 0.7 / (std::sqrt(k * 0.49) + 1e-8);
    EXPECT_NEAR(prev - p[0], want, 1e-15) << "k=" << k;
  }
}

TEST(AdagradTest, AccumulatorsAreMonotone) {
  Adagrad opt(0.05);
  std::vector<double> p = {1, 2, 3};
  double last = 0;
  for (int k = 0; k < 20; ++k) {
    std::vector<double> g = {std::sin(k), std::cos(k), 0.1 * k};
    opt.step(p, g);
    double total = 0;
    for (double a : opt.accumulators()[0]) {
      EXPECT_GE(a, 0.0);
      total += a;
    }
    EXPECT_GE(total, last);
    last = total;
  }
}

TEST(AdagradTest, ZeroLearningRateIsIdentity) {
  Adagrad opt(0.0);
  std::vector<double> p = {1.25, -4}, g = {3, 5};
  opt.step(p, g);
  EXPECT_EQ(p, (std::vector<double>{1.25, -4}));
}

TEST(AdagradTest, ShapeMismatchThrows) {
  Adagrad opt;
  std::vector<double> p = {1, 2}, g = {1};
  EXPECT_THROW(opt.step(p, g), ShapeError);
  std::vector<double> q = {1, 2}, h = {1, 1};
  opt.step(q, h);
  std::vector<double> r = {1, 2, 3}, k = {1, 1, 1};
  EXPECT_THROW(opt.step(r, k), ShapeError);
}

TEST(NelderMeadTest, QuadraticBowl) {
  const std::vector<double> target = {1.0, 2.0, 0.5, 3.0, 1.5};
  auto bowl = [&](std::span<const double> x) {
    double s = 0;
    for (size_t k = 0; k < x.size(); ++k) s += (x[k] - target[k]) * (x[k] - target[k]);
    return s;
  };
  NelderMeadOptions opts;
  opts.budget = 500;
  NelderMeadResult r = nelder_mead(bowl, std::vector<double>(5, 1.2), opts);
  EXPECT_LE(r.evaluations, 500);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(r.best[k], target[k], 1e-3) << "axis " << k;
  EXPECT_EQ(simplex_rank(r.simplex), 5);
}

TEST(NelderMeadTest, ConstantObjectiveReturnsInitialPoint) {
  const std::vector<double> start = {18.65, 4.39, 2.13, 18.68, 68.68};
  NelderMeadOptions opts;
  opts.budget = 60;
  int calls = 0;
  NelderMeadResult r = nelder_mead([&](std::span<const double>) { ++calls; return 3.0; },
                                   start, opts);
  EXPECT_EQ(r.evaluations, 60);
  EXPECT_EQ(calls, 60);
  EXPECT_EQ(r.best, start);
  EXPECT_EQ(r.best_value, 3.0);
}

TEST(NelderMeadTest, InitialSimplexIsFivePercentLogSteps) {
  std::vector<std::vector<double>> seen;
  NelderMeadOptions opts;
  opts.budget = 6;
  const std::vector<double> start = {1, 2, 3, 4, 5};
  nelder_mead([&](std::span<const double> x) {
    seen.emplace_back(x.begin(), x.end());
    return 0.0;
  }, start, opts);
  ASSERT_EQ(seen.size(), 6u);
  EXPECT_EQ(seen[0], start);
  for (int v = 1; v <= 5; ++v) {
    for (int k = 0; k < 5; ++k) {
      const double want = k == v - 1 ? start[k] * std::exp(0.05) : start[k];
      EXPECT_NEAR(seen[v][k], want, 1e-12);
    }
  }
}

TEST(NelderMeadTest, NeverWorseThanInitialAndKeepsSimplexRank) {
  // Piecewise-constant objective with plateaus, similar to an error rate.
  auto stairs = [](std::span<const double> x) {
    double s = 0;
    for (size_t k = 0; k < x.size(); ++k) {
      s += std::floor(8 * std::abs(std::log(x[k]) - 0.3 * static_cast<double>(k))) / 8;
    }
    return s;
  };
  for (int seed = 1; seed <= 5; ++seed) {
    std::vector<double> start(5);
    for (int k = 0; k < 5; ++k) start[k] = 0.5 + 0.37 * ((seed * 7 + k * 3) % 5);
    NelderMeadResult r = nelder_mead(stairs, start, {});
    EXPECT_LE(r.best_value, stairs(start));
    EXPECT_EQ(r.best_value, stairs(r.best));
    EXPECT_EQ(simplex_rank(r.simplex), 5);
    for (size_t k = 1; k < r.history.size(); ++k) EXPECT_LE(r.history[k], r.history[k - 1]);
  }
}

TEST(NelderMeadTest, NonFiniteValuesAreRejected) {
  auto f = [](std::span<const double> x) {
    if (x[0] > 1.02) return std::numeric_limits<double>::quiet_NaN();
    double s = 0;
    for (double v : x) s += (v - 0.5) * (v - 0.5);
    return s;
  };
  NelderMeadResult r = nelder_mead(f, std::vector<double>(3, 1.0), {});
  EXPECT_TRUE(std::isfinite(r.best_value));
  EXPECT_LT(r.best_value, f(std::vector<double>(3, 1.0)));
}

TEST(NelderMeadTest, RejectsBadInput) {
  auto f = [](std::span<const double>) { return 0.0; };
  EXPECT_THROW(nelder_mead(f, std::vector<double>{1.0, -2.0}, {}), InvalidParameter);
  EXPECT_THROW(nelder_mead(f, std::vector<double>{}, {}), InvalidParameter);
}

TEST(CrfScalarsTest, DefaultsAreTheDocumentedOperatingPoint) {
  EXPECT_EQ(CrfScalars{}.to_vector(), (std::vector<double>{18.65, 4.39, 2.13, 18.68, 68.68}));
  CrfParams p = CrfParams::defaults(4);
  EXPECT_EQ(p.widths.theta_alpha, 18.65);
  EXPECT_EQ(p.widths.theta_beta, 4.39);
  EXPECT_EQ(p.widths.theta_gamma, 2.13);
  EXPECT_EQ(p.w_appearance, std::vector<double>(4, 18.68));
  EXPECT_EQ(p.w_spatial, std::vector<double>(4, 68.68));
}

std::vector<StereoSample> small_fixture(uint64_t seed, int count) {
  StereogramOptions o;
  o.height = 24;
  o.width = 32;
  o.d_max = 8;
  o.shapes = 2;
  std::vector<StereoSample> out;
  for (int i = 0; i < count; ++i) out.push_back(make_stereogram(sample_seed(seed, i), o));
  return out;
}

StereoModel small_model(uint64_t seed) {
  SiameseConfig c;
  c.channels = {8, 8};
  StereoModel m = StereoModel::create(c, 8, seed);
  m.crf.iterations = 3;
  apply_scalars(m.crf, {10.0, 10.0, 2.0, 1.0, 1.0});
  return m;
}

double mean_loss(const StereoModel& m, const std::vector<StereoSample>& data) {
  double s = 0;
  for (const auto& sample : data) s += training_step(m, sample, LossConfig{}, false).loss;
  return s / data.size();
}

TEST(TrainScheduleTest, PhaseOneFreezesNet) {
  StereoModel m = small_model(1);
  const SiameseNet before = m.net;
  const CrfParams crf_before = m.crf;
  TrainConfig cfg;
  cfg.phase1_epochs = 2;
  cfg.phase2_epochs = 0;
  train_schedule(m, small_fixture(1, 3), cfg);
  EXPECT_EQ(m.net.serialize(), before.serialize());
  EXPECT_NE(m.crf, crf_before);
  EXPECT_EQ(m.crf.widths, crf_before.widths);
}

TEST(TrainScheduleTest, CrfLearningRateGroupsAreIndependent) {
  const std::vector<StereoSample> data = small_fixture(3, 2);
  TrainConfig cfg;
  cfg.phase1_epochs = 1;
  cfg.phase2_epochs = 0;

  StereoModel a = small_model(3);
  const CrfParams start = a.crf;
  cfg.compat_learning_rate = 0;
  train_schedule(a, data, cfg);
  EXPECT_EQ(a.crf.compatibility, start.compatibility);
  EXPECT_NE(a.crf.w_appearance, start.w_appearance);

  StereoModel b = small_model(3);
  cfg.compat_learning_rate = 0.01;
  cfg.crf_learning_rate = 0;
  train_schedule(b, data, cfg);
  EXPECT_NE(b.crf.compatibility, start.compatibility);
  EXPECT_EQ(b.crf.w_appearance, start.w_appearance);
  EXPECT_EQ(b.crf.w_spatial, start.w_spatial);
}

TEST(TrainScheduleTest, PhaseTwoUpdatesNet) {
  StereoModel m = small_model(2);
  const std::string before = m.net.serialize();
  TrainConfig cfg;
  cfg.phase1_epochs = 1;
  cfg.phase2_epochs = 1;
  std::vector<EpochLog> logs = train_schedule(m, small_fixture(2, 2), cfg);
  ASSERT_EQ(logs.size(), 2u);
  EXPECT_EQ(logs[0].phase, 1);
  EXPECT_EQ(logs[1].phase, 2);
  EXPECT_NE(m.net.serialize(), before);
}

TEST(TrainScheduleTest, PhaseOneLowersTrainingLoss) {
  int lower = 0;
  const int seeds = 10;
  for (int seed = 1; seed <= seeds; ++seed) {
    StereoModel m = small_model(seed);
    std::vector<StereoSample> data = small_fixture(100 + seed, 4);
    const double before = mean_loss(m, data);
    TrainConfig cfg;
    cfg.phase1_epochs = 3;
    cfg.phase2_epochs = 0;
    train_schedule(m, data, cfg);
    if (mean_loss(m, data) < before) ++lower;
  }
  EXPECT_GE(lower, 9);
}

TEST(TrainScheduleTest, LogFormat) {
  EXPECT_EQ(epoch_log_header(), "epoch,phase,mean_loss,error_3px,seconds");
  const std::string line = format_epoch_log({3, 2, 0.5, 0.25, 1.5});
  EXPECT_EQ(line.substr(0, 4), "3,2,");
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
}

TEST(TrainScheduleTest, EmptyDataThrows) {
  StereoModel m = small_model(1);
  EXPECT_THROW(train_schedule(m, {}, TrainConfig{}), EmptyMaskError);
}

}  // namespace
}  // namespace densestereo
