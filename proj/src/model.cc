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


#include "densestereo/model.h"

#include "densestereo/errors.h"
#include "densestereo/join.h"

namespace densestereo {

namespace {

constexpr const char* kJoinStage = "join";

struct JoinRecord {
  DescriptorField left;
  DescriptorField right;
};

}  // namespace

StereoModel StereoModel::create(const SiameseConfig& net_config, int d_max,
                                uint64_t seed) {
  StereoModel m;
  m.net = SiameseNet::random(net_config, seed);
  m.crf = CrfParams::defaults(d_max);
  m.d_max = d_max;
  return m;
}

CostVolume StereoModel::scores(const Image& left, const Image& right,
                               GradientTape* tape) const {
  if (left.height() != right.height() || left.width() != right.width()) {
    throw ShapeError("StereoModel: left and right images differ in H x W");
  }
  DescriptorField l = net.describe(left, Side::kLeft, tape);
  DescriptorField r = net.describe(right, Side::kRight, tape);
  CostVolume c = join_forward(l, r, d_max);
  if (tape) tape->push(kJoinStage, JoinRecord{std::move(l), std::move(r)});
  return c;
}

NetGradients StereoModel::scores_backward(const CostVolume& grad,
                                          GradientTape& tape) const {
  auto rec = tape.pop<JoinRecord>(kJoinStage);
  DescriptorField g_right = join_backward_right(grad, rec.left);
  DescriptorField g_left = join_backward_left(grad, rec.right);
  NetGradients g = net.backward(g_right, tape);
  g.add(net.backward(g_left, tape));
  return g;
}

std::shared_ptr<const MessageFilters> StereoModel::message_filters(
    const Image& left) const {
  return std::make_shared<const MessageFilters>(left, crf.widths, filter,
                                                crf.normalize_messages);
}

void StereoModel::save(const std::string& prefix) const {
  net.save(prefix + ".net");
  KeyValueFile kv = crf.to_keyvalue();
  kv.set_int("d_max", d_max);
  kv.set("filter", std::string(filter_method_name(filter)));
  kv.save(prefix + ".crf");
}

StereoModel StereoModel::load(const std::string& prefix) {
  StereoModel m;
  m.net = SiameseNet::load(prefix + ".net");
  KeyValueFile kv = KeyValueFile::load(prefix + ".crf");
  m.crf = CrfParams::from_keyvalue(kv);
  m.d_max = static_cast<int>(kv.get_int("d_max"));
  if (kv.has("filter")) m.filter = parse_filter_method(kv.get_string("filter"));
  if (m.d_max != m.crf.labels()) {
    throw FormatError(prefix + ".crf: d_max disagrees with the CRF label count");
  }
  return m;
}

DisparityMap infer_from_scores(const StereoModel& model, const CostVolume& scores,
                               const Image& left, const InferOptions& options,
                               std::shared_ptr<const MessageFilters> filters,
                               CostVolume* q_out) {
  const int iterations = options.iterations.value_or(model.crf.iterations);
  if (iterations < 0) throw InvalidParameter("infer: negative iteration count");
  if (iterations == 0 && !options.sgm && options.post == PostMode::kNone) {
    return argmax_disparity(scores, Extremum::kMax);
  }
  CostVolume costs;
  if (iterations == 0) {
    costs = similarity_to_cost(scores);
  } else {
    CrfParams params = model.crf;
    params.iterations = iterations;
    if (!filters) filters = model.message_filters(left);
    CostVolume q = meanfield_forward(scores, filters, params, nullptr);
    costs = probability_to_cost(q);
    if (q_out) *q_out = std::move(q);
  }
  if (options.sgm) costs = sgm_aggregate(costs, options.sgm_config);
  return postprocess(costs, options.post);
}

Inference infer(const StereoModel& model, const Image& left, const Image& right,
                const InferOptions& options) {
  Inference out;
  out.scores = model.scores(left, right);
  out.disparity = infer_from_scores(model, out.scores, left, options, nullptr, &out.q);
  return out;
}

}  // namespace densestereo
