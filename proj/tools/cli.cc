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


// Command-line front end: gen, pretrain, calibrate, train, infer, eval.
// Exit status 0 on success, 1 on usage errors, 2 on data errors.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "densestereo/dataset.h"
#include "densestereo/errors.h"
#include "densestereo/evaluate.h"
#include "densestereo/hinge.h"
#include "densestereo/io.h"
#include "densestereo/keyvalue.h"
#include "densestereo/model.h"
#include "densestereo/parallel.h"
#include "densestereo/synthetic.h"
#include "densestereo/training.h"

namespace densestereo {
namespace {

namespace fs = std::filesystem;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config;
  std::optional<int> iterations;
  std::string filter;
  std::string post = "none";
  uint64_t seed = 1;
  int threads = 1;
};

// Values read from --config. CRF keys override the loaded model, the rest
// fill in defaults that command-line flags may replace.
struct ConfigFile {
  std::optional<KeyValueFile> kv;

  bool has(const char* key) const { return kv && kv->has(key); }

  void apply_crf(CrfParams& crf) const {
    if (!kv) return;
    KernelWidths& w = crf.widths;
    if (kv->has("theta_alpha")) w.theta_alpha = kv->get_double("theta_alpha");
    if (kv->has("theta_beta")) w.theta_beta = kv->get_double("theta_beta");
    if (kv->has("theta_gamma")) w.theta_gamma = kv->get_double("theta_gamma");
    if (kv->has("iterations")) crf.iterations = static_cast<int>(kv->get_int("iterations"));
    if (kv->has("normalize_messages")) {
      crf.normalize_messages = kv->get_int("normalize_messages") != 0;
    }
    apply_weights("w_appearance", crf.w_appearance);
    apply_weights("w_spatial", crf.w_spatial);
    crf.validate();
  }

  void apply_weights(const char* key, std::vector<double>& w) const {
    if (!kv->has(key)) return;
    std::vector<double> v = kv->get_doubles(key);
    if (v.size() == 1) {
      std::fill(w.begin(), w.end(), v[0]);
    } else if (v.size() == w.size()) {
      w = v;
    } else {
      throw UsageError(std::string("config: ") + key + " needs 1 or " +
                       std::to_string(w.size()) + " values");
    }
  }
};

const std::vector<std::string> kConfigKeys = {
    "theta_alpha", "theta_beta", "theta_gamma", "iterations", "normalize_messages",
    "w_appearance", "w_spatial", "d_max", "sgm_p1", "sgm_p2", "sgm_directions"};

ConfigFile load_config(const std::string& path) {
  ConfigFile c;
  if (path.empty()) return c;
  c.kv = KeyValueFile::load(path);
  for (const auto& key : c.kv->keys()) {
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
      throw UsageError(path + ": unknown key '" + key + "'");
    }
  }
  return c;
}

StereoModel load_model(const std::string& prefix, const GlobalOptions& g,
                       const ConfigFile& config) {
  StereoModel m = StereoModel::load(prefix);
  config.apply_crf(m.crf);
  if (!g.filter.empty()) m.filter = parse_filter_method(g.filter);
  return m;
}

InferOptions infer_options(const GlobalOptions& g, const ConfigFile& config, bool sgm) {
  InferOptions o;
  o.iterations = g.iterations;
  o.post = parse_post_mode(g.post);
  o.sgm = sgm;
  if (config.has("sgm_p1")) o.sgm_config.p1 = config.kv->get_double("sgm_p1");
  if (config.has("sgm_p2")) o.sgm_config.p2 = config.kv->get_double("sgm_p2");
  if (config.has("sgm_directions")) {
    o.sgm_config.directions = static_cast<int>(config.kv->get_int("sgm_directions"));
  }
  o.sgm_config.validate();
  return o;
}

int config_d_max(const ConfigFile& config, int fallback) {
  return config.has("d_max") ? static_cast<int>(config.kv->get_int("d_max")) : fallback;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void save_disparity(const std::string& path, const DisparityMap& d) {
  if (has_suffix(path, ".png")) {
    save_kitti_disparity(path, d);
  } else {
    save_pfm(path, d);
  }
}

DisparityMap load_disparity(const std::string& path) {
  return has_suffix(path, ".png") ? load_kitti_disparity(path) : load_pfm_disparity(path);
}

std::vector<StereoSample> load_samples(const std::string& dir, int d_max, int limit) {
  std::vector<StereoSample> s = strip_names(load_dataset(dir, d_max));
  if (limit > 0 && static_cast<int>(s.size()) > limit) s.resize(limit);
  return s;
}

struct GenArgs {
  std::string out;
  int count = 10;
  StereogramOptions options;
};

int run_gen(const GlobalOptions& g, const ConfigFile& config, GenArgs a) {
  a.options.d_max = config_d_max(config, a.options.d_max);
  for (int i = 0; i < a.count; ++i) {
    save_sample(a.out, sample_name(i), make_stereogram(sample_seed(g.seed, i), a.options));
  }
  std::cout << "wrote " << a.count << " samples to " << a.out << "\n";
  return 0;
}

struct PretrainArgs {
  std::string data;
  std::string out;
  std::string init;
  int d_max = 16;
  int limit = 0;
  std::vector<int> channels = {16, 16, 16, 16};
  HingeConfig hinge;
};

int run_pretrain(const GlobalOptions& g, const ConfigFile& config, PretrainArgs a) {
  a.d_max = config_d_max(config, a.d_max);
  StereoModel m;
  if (a.init.empty()) {
    SiameseConfig net;
    net.channels = a.channels;
    m = StereoModel::create(net, a.d_max, g.seed);
  } else {
    m = load_model(a.init, g, config);
  }
  std::vector<StereoSample> samples = load_samples(a.data, m.d_max, a.limit);
  a.hinge.seed = g.seed;
  a.hinge.threads = g.threads;
  std::vector<double> losses;
  m.net = hinge_pretrain(m.net, samples, m.d_max, a.hinge, &losses);
  for (size_t e = 0; e < losses.size(); ++e) {
    std::cout << "epoch " << e + 1 << " hinge " << losses[e] << "\n";
  }
  m.save(a.out);
  return 0;
}

struct CalibrateArgs {
  std::string model;
  std::string data;
  std::string out;
  int limit = 20;
  int budget = 300;
};

int run_calibrate(const GlobalOptions& g, const ConfigFile& config, const CalibrateArgs& a) {
  StereoModel m = load_model(a.model, g, config);
  if (g.iterations) m.crf.iterations = *g.iterations;
  std::vector<StereoSample> samples = load_samples(a.data, m.d_max, a.limit);
  const CrfScalars start{m.crf.widths.theta_alpha, m.crf.widths.theta_beta,
                         m.crf.widths.theta_gamma, m.crf.w_appearance[0],
                         m.crf.w_spatial[0]};
  CalibrationObjective objective(m, samples);
  const double before = objective.evaluate(start);
  NelderMeadResult r = calibrate(m, samples, start, a.budget);
  apply_scalars(m.crf, CrfScalars::from_vector(r.best));
  std::cout << "objective " << before << " -> " << r.best_value << " after "
            << r.evaluations << " evaluations\n";
  m.save(a.out);
  return 0;
}

struct TrainArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string log;
  std::string loss = "cross-entropy";
  int limit = 0;
  TrainConfig train;
};

int run_train(const GlobalOptions& g, const ConfigFile& config, TrainArgs a) {
  StereoModel m = load_model(a.model, g, config);
  if (g.iterations) m.crf.iterations = *g.iterations;
  std::vector<StereoSample> samples = load_samples(a.data, m.d_max, a.limit);
  a.train.loss.kind = parse_loss_kind(a.loss);
  std::ofstream log;
  if (!a.log.empty()) {
    log.open(a.log);
    if (!log) throw FormatError(a.log + ": cannot open for writing");
    log << epoch_log_header() << "\n";
  }
  train_schedule(m, samples, a.train, [&](const EpochLog& e) {
    std::cout << format_epoch_log(e) << std::endl;
    if (log.is_open()) log << format_epoch_log(e) << "\n" << std::flush;
  });
  m.save(a.out);
  return 0;
}

struct InferArgs {
  std::string model;
  std::string left;
  std::string right;
  std::string out;
  bool sgm = false;
};

int run_infer(const GlobalOptions& g, const ConfigFile& config, const InferArgs& a) {
  StereoModel m = load_model(a.model, g, config);
  Image left = load_png_image(a.left);
  Image right = load_png_image(a.right);
  Inference r = infer(m, left, right, infer_options(g, config, a.sgm));
  save_disparity(a.out, r.disparity);
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string data;
  std::string pred_dir;
  std::string write_pred;
  std::string report;
  int d_max = 16;
  int limit = 0;
  bool sgm = false;
};

std::string find_prediction(const std::string& dir, const std::string& name) {
  for (const char* ext : {".pfm", ".png"}) {
    fs::path p = fs::path(dir) / (name + ext);
    if (fs::exists(p)) return p.string();
  }
  throw FormatError(dir + ": no prediction for " + name);
}

int run_eval(const GlobalOptions& g, const ConfigFile& config, EvalArgs a) {
  if (a.model.empty() == a.pred_dir.empty()) {
    throw UsageError("eval needs exactly one of --model or --pred-dir");
  }
  std::optional<StereoModel> m;
  if (!a.model.empty()) m = load_model(a.model, g, config);
  const int d_max = m ? m->d_max : config_d_max(config, a.d_max);
  std::vector<NamedSample> data = load_dataset(a.data, d_max);
  if (a.limit > 0 && static_cast<int>(data.size()) > a.limit) data.resize(a.limit);
  const InferOptions opts = infer_options(g, config, a.sgm);
  if (!a.write_pred.empty()) fs::create_directories(a.write_pred);
  EvalReport report;
  for (const NamedSample& ns : data) {
    const auto t0 = std::chrono::steady_clock::now();
    DisparityMap pred;
    if (m) {
      pred = infer(*m, ns.sample.left, ns.sample.right, opts).disparity;
    } else {
      pred = load_disparity(find_prediction(a.pred_dir, ns.name));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!a.write_pred.empty()) {
      save_pfm((fs::path(a.write_pred) / (ns.name + ".pfm")).string(), pred);
    }
    ImageScore s = score_image(pred, ns.sample.gt_left, ns.sample.mask);
    s.name = ns.name;
    s.seconds = secs;
    report.add(std::move(s));
  }
  if (report.valid() == 0) throw EmptyMaskError("eval: no valid pixels");
  const std::string table = report.table();
  std::cout << table;
  if (!a.report.empty()) {
    std::ofstream f(a.report);
    if (!f) throw FormatError(a.report + ": cannot open for writing");
    f << table;
  }
  return 0;
}

}  // namespace
}  // namespace densestereo

int main(int argc, char** argv) {
  using namespace densestereo;
  CLI::App app{"Dense CRF stereo matching"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Flat key = value file");
  app.add_option("--iterations", g.iterations, "Mean-field iterations T")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--filter", g.filter, "lattice or bruteforce")
      ->check(CLI::IsMember({"lattice", "bruteforce"}));
  app.add_option("--post", g.post, "none or full")->check(CLI::IsMember({"none", "full"}));
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic stereo dataset");
  gen_cmd->add_option("--out", gen.out)->required();
  gen_cmd->add_option("--count", gen.count)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--height", gen.options.height);
  gen_cmd->add_option("--width", gen.options.width);
  gen_cmd->add_option("--d-max", gen.options.d_max);
  gen_cmd->add_option("--shapes", gen.options.shapes);
  gen_cmd->add_option("--noise", gen.options.noise);

  PretrainArgs pre;
  auto* pre_cmd = app.add_subcommand("pretrain", "Hinge-loss descriptor training");
  pre_cmd->add_option("--data", pre.data)->required();
  pre_cmd->add_option("--out", pre.out, "Model prefix")->required();
  pre_cmd->add_option("--init", pre.init, "Start from this model prefix");
  pre_cmd->add_option("--d-max", pre.d_max);
  pre_cmd->add_option("--limit", pre.limit, "Use the first N samples");
  pre_cmd->add_option("--channels", pre.channels)->expected(1, 16);
  pre_cmd->add_option("--epochs", pre.hinge.epochs);
  pre_cmd->add_option("--pairs", pre.hinge.pairs_per_image);
  pre_cmd->add_option("--lr", pre.hinge.learning_rate);
  pre_cmd->add_option("--margin", pre.hinge.margin);

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Nelder-Mead over the CRF scalars");
  cal_cmd->add_option("--model", cal.model)->required();
  cal_cmd->add_option("--data", cal.data)->required();
  cal_cmd->add_option("--out", cal.out)->required();
  cal_cmd->add_option("--limit", cal.limit, "Use the first N samples");
  cal_cmd->add_option("--budget", cal.budget)->check(CLI::PositiveNumber);

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Two-phase CRF and net training");
  tr_cmd->add_option("--model", tr.model)->required();
  tr_cmd->add_option("--data", tr.data)->required();
  tr_cmd->add_option("--out", tr.out)->required();
  tr_cmd->add_option("--log", tr.log, "CSV epoch log");
  tr_cmd->add_option("--loss", tr.loss)
      ->check(CLI::IsMember({"cross-entropy", "piecewise-linear"}));
  tr_cmd->add_option("--limit", tr.limit);
  tr_cmd->add_option("--phase1", tr.train.phase1_epochs);
  tr_cmd->add_option("--phase2", tr.train.phase2_epochs);
  tr_cmd->add_option("--crf-lr", tr.train.crf_learning_rate, "Kernel weight learning rate");
  tr_cmd->add_option("--compat-lr", tr.train.compat_learning_rate,
                     "Compatibility matrix learning rate");
  tr_cmd->add_option("--net-lr", tr.train.net_learning_rate);
  tr_cmd->add_option("--alpha", tr.train.loss.entropy_alpha);

  InferArgs inf;
  auto* inf_cmd = app.add_subcommand("infer", "Disparity map for one pair");
  inf_cmd->add_option("--model", inf.model)->required();
  inf_cmd->add_option("--left", inf.left)->required();
  inf_cmd->add_option("--right", inf.right)->required();
  inf_cmd->add_option("--out", inf.out, ".pfm or .png (KITTI 16-bit)")->required();
  inf_cmd->add_flag("--sgm", inf.sgm);

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Error rates over a dataset");
  ev_cmd->add_option("--data", ev.data)->required();
  ev_cmd->add_option("--model", ev.model);
  ev_cmd->add_option("--pred-dir", ev.pred_dir, "Score <name>.pfm/.png predictions");
  ev_cmd->add_option("--write-pred", ev.write_pred);
  ev_cmd->add_option("--report", ev.report, "CSV output");
  ev_cmd->add_option("--d-max", ev.d_max);
  ev_cmd->add_option("--limit", ev.limit);
  ev_cmd->add_flag("--sgm", ev.sgm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    set_num_threads(g.threads);
    const ConfigFile config = load_config(g.config);
    if (*gen_cmd) return run_gen(g, config, gen);
    if (*pre_cmd) return run_pretrain(g, config, pre);
    if (*cal_cmd) return run_calibrate(g, config, cal);
    if (*tr_cmd) return run_train(g, config, tr);
    if (*inf_cmd) return run_infer(g, config, inf);
    if (*ev_cmd) return run_eval(g, config, ev);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}
