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
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <sys/wait.h>

#include "densestereo/dataset.h"
#include "densestereo/evaluate.h"
#include "densestereo/io.h"
#include "densestereo/join.h"
#include "densestereo/model.h"
#include "densestereo/parallel.h"
#include "densestereo/training.h"
#include "densestereo/synthetic.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace densestereo {
namespace {

namespace fs = std::filesystem;

std::string temp_path(const std::string& name) {
  fs::path dir = fs::path(::testing::TempDir()) / "densestereo_pipeline";
  fs::create_directories(dir);
  return (dir / name).string();
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  f << bytes;
}

std::string read_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string float_le(float v) {
  unsigned char b[4];
  std::memcpy(b, &v, 4);
  return std::string(reinterpret_cast<char*>(b), 4);
}

TEST(KittiTest, DecodeConvention) {
  EXPECT_TRUE(DisparityMap::is_missing(decode_kitti(0)));
  EXPECT_EQ(decode_kitti(256), 1.0);
  EXPECT_EQ(decode_kitti(16960), 66.25);
  for (int raw = 1; raw <= 65535; ++raw) {
    ASSERT_EQ(encode_kitti(decode_kitti(static_cast<uint16_t>(raw))), raw);
  }
  EXPECT_EQ(encode_kitti(DisparityMap::kMissing), 0);
}

TEST(KittiTest, PngRoundTrip) {
  DisparityMap d(3, 4);
  d.set(0, 1.0);
  d.set(5, 66.25);
  d.set(11, 0.5);
  const std::string path = temp_path("disp.png");
  save_kitti_disparity(path, d);
  EXPECT_EQ(load_kitti_disparity(path), d);
}

TEST(KittiTest, EightBitImageRejected) {
  const std::string path = temp_path("rgb.png");
  save_png_image(path, testing::random_image(2, 2, 1));
  EXPECT_THROW(load_kitti_disparity(path), FormatError);
}

TEST(PfmTest, MinimalFile) {
  const std::string path = temp_path("one.pfm");
  write_bytes(path, "Pf\n1 1\n-1.0\n" + float_le(2.5f));
  DisparityMap d = load_pfm_disparity(path);
  ASSERT_EQ(d.pixels(), 1);
  EXPECT_EQ(d[0], 2.5);
}

TEST(PfmTest, BottomUpRowsAndInfinity) {
  const std::string path = temp_path("rows.pfm");
  const float inf = std::numeric_limits<float>::infinity();
  write_bytes(path, "Pf\n2 2\n-1.0\n" + float_le(3) + float_le(4) + float_le(1) + float_le(-inf));
  DisparityMap d = load_pfm_disparity(path);
  EXPECT_EQ(d.at(0, 0), 1.0);
  EXPECT_TRUE(d.missing(1));
  EXPECT_EQ(d.at(1, 0), 3.0);
  EXPECT_EQ(d.at(1, 1), 4.0);
}

TEST(PfmTest, RoundTripIsBitExact) {
  DisparityMap d(5, 7);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(0, 64);
  for (int i = 0; i < 35; ++i) d.set(i, i % 6 == 0 ? DisparityMap::kMissing : u(rng));
  const std::string path = temp_path("rt.pfm");
  save_pfm(path, d);
  const std::string first = read_bytes(path);
  EXPECT_EQ(first.substr(0, 3), "Pf\n");
  EXPECT_EQ(load_pfm_disparity(path), d);
  save_pfm(path, load_pfm_disparity(path));
  EXPECT_EQ(read_bytes(path), first);
}

TEST(PfmTest, ColorFileGivesImage) {
  Image img(2, 3, 3);
  for (int k = 0; k < 18; ++k) img.data()[k] = k * 0.5;
  const std::string path = temp_path("color.pfm");
  save_pfm(path, img);
  auto v = load_pfm(path);
  ASSERT_TRUE(std::holds_alternative<Image>(v));
  EXPECT_EQ(std::get<Image>(v), img);
  EXPECT_THROW(load_pfm_disparity(path), FormatError);
}

TEST(PfmTest, BigEndianPayload) {
  const std::string path = temp_path("be.pfm");
  std::string le = float_le(7.25f);
  write_bytes(path, "Pf\n1 1\n1.0\n" + std::string(le.rbegin(), le.rend()));
  EXPECT_EQ(load_pfm_disparity(path)[0], 7.25);
}

TEST(PfmTest, MalformedFilesRejected) {
  const std::string path = temp_path("bad.pfm");
  write_bytes(path, "P5\n1 1\n-1.0\n" + float_le(1));
  EXPECT_THROW(load_pfm(path), FormatError);
  write_bytes(path, "Pf\n2 2\n-1.0\n" + float_le(1));
  EXPECT_THROW(load_pfm(path), FormatError);
  write_bytes(path, "Pf\nx 2\n-1.0\n");
  EXPECT_THROW(load_pfm(path), FormatError);
}

TEST(SyntheticTest, DeterministicPerSeed) {
  StereogramOptions o;
  StereoSample a = make_stereogram(17, o), b = make_stereogram(17, o);
  EXPECT_EQ(a.left, b.left);
  EXPECT_EQ(a.right, b.right);
  EXPECT_EQ(a.gt_left, b.gt_left);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_NE(make_stereogram(18, o).left, a.left);
}

TEST(SyntheticTest, InfeasibleGeometryRejected) {
  StereogramOptions o;
  o.width = 40;
  o.d_max = 16;
  EXPECT_THROW(make_stereogram(1, o), InvalidParameter);
}

TEST(SyntheticTest, PureShiftIsRecoveredByJoin) {
  StereogramOptions o;
  o.shapes = 0;
  o.noise = 0;
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    StereoSample s = make_stereogram(seed, o);
    const double d_bg = s.gt_left[0];
    for (int i = 0; i < s.gt_left.pixels(); ++i) ASSERT_EQ(s.gt_left[i], d_bg);
    // One linear 3x3 layer: an injective map of the raw intensity patch.
    SiameseConfig cfg;
    cfg.channels = {27};
    cfg.standardize_input = false;
    SiameseNet raw = SiameseNet::random(cfg, seed);
    CostVolume c = join_forward(raw.describe(s.left, Side::kLeft),
                                raw.describe(s.right, Side::kRight), o.d_max);
    DisparityMap d = argmax_disparity(c);
    for (int y = 0; y < o.height; ++y) {
      for (int x = o.d_max + 1; x + 1 < o.width; ++x) {
        EXPECT_EQ(d.at(y, x), d_bg) << "seed " << seed << " (" << y << "," << x << ")";
      }
    }
  }
}

TEST(SyntheticTest, OcclusionShadowMatchesDisparityStep) {
  SceneSpec spec;
  spec.background_disparity = 2;
  spec.background_seed = 3;
  spec.rects = {{20, 10, 36, 30, 7, 4, 1.0}, {44, 40, 56, 50, 5, 5, 1.0}};
  StereoSample s = render_scene(spec);
  MaskOptions only_lr;
  only_lr.exposure_ceiling = false;
  ValidityMask m = build_training_mask(s.gt_left, &*s.gt_right, s.left, 16, only_lr);
  long occluded = 0;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (!m.at(y, x) && x - s.gt_left.at(y, x) >= 0) ++occluded;
    }
  }
  EXPECT_EQ(occluded, (7 - 2) * 20 + (5 - 2) * 10);
}

TEST(EvaluateTest, Examples) {
  DisparityMap gt(4, 4, 5.0);
  ValidityMask all(4, 4, true);
  EvalReport same = evaluate(gt, gt, all);
  EXPECT_EQ(same.error1(), 0.0);
  EXPECT_EQ(same.error3(), 0.0);
  EvalReport shifted = evaluate(DisparityMap(4, 4, 7.0), gt, all);
  EXPECT_EQ(shifted.error1(), 1.0);
  EXPECT_EQ(shifted.error3(), 0.0);
  DisparityMap half = gt;
  for (int i = 0; i < 16; i += 2) half.set(i, 10.0);
  EvalReport h = evaluate(half, gt, all);
  EXPECT_EQ(h.error1(), 0.5);
  EXPECT_EQ(h.error3(), 0.5);
  EXPECT_THROW(evaluate(gt, gt, ValidityMask(4, 4, false)), EmptyMaskError);
  EXPECT_THROW(evaluate(gt, DisparityMap(4, 5), all), ShapeError);
}

TEST(EvaluateTest, PermutationSymmetric) {
  std::mt19937_64 rng(3);
  const int n = 30;
  DisparityMap pred(1, n), gt(1, n);
  ValidityMask mask(1, n);
  for (int i = 0; i < n; ++i) {
    pred.set(i, rng() % 16);
    gt.set(i, rng() % 16);
    mask.set(i, rng() % 3 != 0);
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  DisparityMap p2(1, n), g2(1, n);
  ValidityMask m2(1, n);
  for (int i = 0; i < n; ++i) {
    p2.set(i, pred[perm[i]]);
    g2.set(i, gt[perm[i]]);
    m2.set(i, mask[perm[i]]);
  }
  EvalReport a = evaluate(pred, gt, mask), b = evaluate(p2, g2, m2);
  EXPECT_EQ(a.error1(), b.error1());
  EXPECT_EQ(a.error3(), b.error3());
  EXPECT_EQ(a.mae(), b.mae());
}

TEST(EvaluateTest, AggregateIsPixelWeighted) {
  EvalReport r;
  ImageScore a, b;
  a.valid = 10;
  a.bad3 = 5;
  b.valid = 30;
  b.bad3 = 3;
  r.add(a);
  r.add(b);
  EXPECT_EQ(r.error3(), 8.0 / 40);
  EXPECT_NE(r.table().find("ALL,40,"), std::string::npos);
}

TEST(DatasetTest, SaveAndLoad) {
  const std::string dir = temp_path("dataset");
  fs::remove_all(dir);
  StereogramOptions o;
  o.height = 20;
  o.width = 32;
  o.d_max = 8;
  std::vector<StereoSample> made;
  for (int i = 0; i < 3; ++i) {
    made.push_back(make_stereogram(sample_seed(9, i), o));
    save_sample(dir, sample_name(i), made.back());
  }
  std::vector<NamedSample> loaded = load_dataset(dir, 8);
  ASSERT_EQ(loaded.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(loaded[i].name, sample_name(i));
    EXPECT_EQ(loaded[i].sample.left, made[i].left);
    EXPECT_EQ(loaded[i].sample.right, made[i].right);
    EXPECT_EQ(loaded[i].sample.gt_left, made[i].gt_left);
    EXPECT_EQ(loaded[i].sample.mask, made[i].mask);
  }
  EXPECT_THROW(load_dataset(temp_path("missing_dir"), 8), FormatError);
}

StereoModel tiny_model() {
  SiameseConfig c;
  c.channels = {6, 6};
  StereoModel m = StereoModel::create(c, 8, 4);
  m.crf.iterations = 2;
  return m;
}

TEST(ModelTest, ZeroIterationsIsRawArgmax) {
  StereoModel m = tiny_model();
  StereoSample s = make_stereogram(3, {24, 32, 8, 2, 4.0, 0.15});
  InferOptions o;
  o.iterations = 0;
  Inference r = infer(m, s.left, s.right, o);
  EXPECT_EQ(r.disparity, argmax_disparity(m.scores(s.left, s.right)));
}

TEST(ModelTest, SaveLoadRoundTrip) {
  StereoModel m = tiny_model();
  m.crf.w_spatial[3] = 0.125;
  m.filter = FilterMethod::kBruteForce;
  const std::string prefix = temp_path("model");
  m.save(prefix);
  StereoModel back = StereoModel::load(prefix);
  EXPECT_EQ(back.net, m.net);
  EXPECT_EQ(back.crf, m.crf);
  EXPECT_EQ(back.d_max, m.d_max);
  EXPECT_EQ(back.filter, m.filter);
}

TEST(ModelTest, InferIsDeterministicAcrossThreadCounts) {
  StereoModel m = tiny_model();
  StereoSample s = make_stereogram(5, {24, 32, 8, 2, 4.0, 0.15});
  InferOptions o;
  o.sgm = true;
  set_num_threads(1);
  Inference a = infer(m, s.left, s.right, o);
  set_num_threads(3);
  Inference b = infer(m, s.left, s.right, o);
  set_num_threads(1);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.disparity, b.disparity);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DENSESTEREO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, GenIsDeterministic) {
  const std::string a = temp_path("gen_a"), b = temp_path("gen_b");
  fs::remove_all(a);
  fs::remove_all(b);
  ASSERT_EQ(run_cli("--seed 7 gen --count 5 --out " + a), 0);
  ASSERT_EQ(run_cli("--seed 7 gen --count 5 --out " + b), 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = fs::path(b) / e.path().filename();
    EXPECT_EQ(read_bytes(e.path().string()), read_bytes(other.string())) << e.path();
    ++files;
  }
  EXPECT_EQ(files, 5 * 4);
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("gen --no-such-flag"), 1);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("--filter fft gen --out x"), 1);
  EXPECT_EQ(run_cli("eval --data " + temp_path("nowhere") + " --pred-dir x"), 2);
  EXPECT_EQ(run_cli("--seed 1 gen --count 1 --width 40 --d-max 16 --out " +
                    temp_path("infeasible")),
            1);
}

TEST(CliTest, EvalOnGroundTruthIsZero) {
  const std::string data = temp_path("eval_data"), pred = temp_path("eval_pred");
  fs::remove_all(data);
  fs::remove_all(pred);
  ASSERT_EQ(run_cli("--seed 3 gen --count 3 --out " + data), 0);
  fs::create_directories(pred);
  for (int i = 0; i < 3; ++i) {
    fs::copy_file(fs::path(data) / (sample_name(i) + "_disp_left.pfm"),
                  fs::path(pred) / (sample_name(i) + ".pfm"));
  }
  const std::string report = temp_path("eval.csv");
  ASSERT_EQ(run_cli("eval --data " + data + " --pred-dir " + pred + " --report " + report), 0);
  const std::string table = read_bytes(report);
  EXPECT_NE(table.find("\nALL,"), std::string::npos);
  EXPECT_NE(table.find(",0.000000,0.000000,0.000000,\n"), std::string::npos) << table;
}

TEST(CliTest, InferZeroIterationsMatchesJoinArgmax) {
  StereoModel m = tiny_model();
  const std::string prefix = temp_path("cli_model");
  m.save(prefix);
  StereoSample s = make_stereogram(8, {24, 32, 8, 2, 4.0, 0.15});
  save_sample(temp_path("cli_pair"), "p", s);
  const std::string base = (fs::path(temp_path("cli_pair")) / "p").string();
  const std::string out = temp_path("cli_out.pfm");
  ASSERT_EQ(run_cli("--iterations 0 infer --model " + prefix + " --left " + base +
                    "_left.png --right " + base + "_right.png --out " + out),
            0);
  EXPECT_EQ(load_pfm_disparity(out), argmax_disparity(m.scores(s.left, s.right)));
}

}  // namespace
}  // namespace densestereo
