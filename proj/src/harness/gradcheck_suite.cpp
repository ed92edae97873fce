/* Copyright 2026 The StreetNav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "streetnav/harness/gradcheck_suite.hpp"

#include <algorithm>

#include "streetnav/nav/models.hpp"
#include "streetnav/route/world.hpp"
#include "streetnav/sdr/models.hpp"
#include "streetnav/sdr/targets.hpp"
#include "streetnav/tensor/ops.hpp"

namespace streetnav::harness {

using namespace tensor;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, bool requires_grad = true) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return Tensor::from(std::move(shape), std::move(v), requires_grad);
}

GradCheckReport check_inputs(const std::function<Tensor()>& f, std::vector<Tensor> inputs) {
  return finite_diff_check(f, inputs);
}

sdr::ModelConfig sdr_toy(sdr::ModelKind kind) {
  sdr::ModelConfig c;
  c.kind = kind;
  c.channels = 4;
  c.levels = 2;
  c.level_channels = {3, 2};
  c.mlp_hidden = 8;
  c.text = {6, 4, 4};
  c.init_scale = 0.5;
  return c;
}

nav::ModelConfig nav_toy(nav::ModelKind kind, std::size_t vocab) {
  nav::ModelConfig c;
  c.kind = kind;
  c.obs_height = 16;
  c.obs_width = 16;
  c.convs = {{3, 4, 2}, {4, 3, 2}};
  c.image_dim = 6;
  c.ga_hidden = 5;
  c.text = {vocab, 4, 5};
  c.action_dim = 3;
  c.time_dim = 3;
  c.lstm_hidden = 6;
  c.horizon = 3;  // shorter than the demonstration, so the clamp is exercised
  c.init_scale = 0.5;
  return c;
}

// Draws toy instances until every ReLU input is at least kKinkMargin from
// zero, then checks the first such instance. Near a kink the central
// difference straddles two linear pieces and disagrees with either one-sided
// derivative, which says nothing about the backward pass.
template <typename Terms, typename Draw>
GradCheckEntry check_smooth_instance(std::string name, const Terms& terms, const Draw& draw) {
  for (std::size_t attempt = 1;; ++attempt) {
    ParamStore store;
    draw(store);
    Bindings b = store.bind();
    double margin = 0.0;
    {
      KinkProbe probe;
      terms(b);
      margin = probe.margin();
    }
    if (margin >= kKinkMargin || attempt == kMaxDraws) {
      return {std::move(name), finite_diff_check_terms(terms, b), attempt, margin};
    }
  }
}

}  // namespace

std::vector<GradCheckEntry> run_gradcheck_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckEntry> out;

  {
    Tensor x = random_tensor({2, 5, 7}, rng), k = random_tensor({3, 2, 3, 3}, rng);
    Tensor y = random_tensor({3, 3, 4}, rng, false);
    out.push_back({"conv2d", check_inputs([&] { return sum(mul(conv2d(x, k, {2, 1}), y)); }, {x, k})});
  }
  {
    Tensor x = random_tensor({3, 3, 4}, rng), k = random_tensor({3, 2, 3, 3}, rng);
    Tensor y = random_tensor({2, 5, 7}, rng, false);
    out.push_back({"deconv2d", check_inputs([&] { return sum(mul(deconv2d(x, k, {2, 1}), y)); }, {x, k})});
  }
  {
    Tensor x = random_tensor({3}, rng), h = random_tensor({4}, rng), c = random_tensor({4}, rng);
    Tensor wi = random_tensor({16, 3}, rng), wh = random_tensor({16, 4}, rng), b = random_tensor({16}, rng);
    Tensor y = random_tensor({4}, rng, false), z = random_tensor({4}, rng, false);
    out.push_back({"lstm_step", check_inputs(
                                    [&] {
                                      const auto s = lstm_step(x, {h, c}, {wi, wh, b});
                                      return add(sum(mul(s.h, y)), sum(mul(s.c, z)));
                                    },
                                    {x, h, c, wi, wh, b})});
  }
  {
    const sdr::GridSpec grid{4, 6, 1.0};
    const Tensor target = sdr::gaussian_target({2.5, 1.5}, grid, 1.0);
    Tensor scores = random_tensor({4, 6}, rng);
    out.push_back({"softmax_kl", check_inputs([&] { return kl_divergence(target, softmax(scores)); }, {scores})});
  }

  const sdr::GridSpec grid{4, 8, 1.0};
  const Tensor target = sdr::gaussian_target({5.5, 1.5}, grid, 1.5);
  const std::vector<std::size_t> tokens = {3, 1, 4};
  for (sdr::ModelKind kind : {sdr::ModelKind::kLingUNet, sdr::ModelKind::kUNet, sdr::ModelKind::kConcat,
                              sdr::ModelKind::kConcatConv, sdr::ModelKind::kText2Conv}) {
    const sdr::SdrModel m(sdr_toy(kind));
    Tensor f;
    auto loss = [&](const Bindings& p) {
      return std::vector<Tensor>{kl_divergence_logits(target, m.logits(p, f, tokens))};
    };
    out.push_back(check_smooth_instance(std::string(sdr::to_string(kind)), loss, [&](ParamStore& store) {
      m.init(store, rng);
      f = random_tensor({4, 4, 8}, rng, false);
    }));
  }

  route::WorldConfig wc;
  wc.seed = 11;
  wc.grid_rows = 6;
  wc.grid_cols = 6;
  wc.sdr_train = 4;
  wc.sdr_dev = 2;
  wc.nav_train = 2;
  wc.nav_dev = 1;
  wc.nav_test = 1;
  const route::World world = route::generate_world(wc);
  const sdr::FeatureLookup features = [&world](const std::string& id) {
    return std::make_shared<const sdr::FeatureMap>(world.features.at(id));
  };
  // A short demonstration and a three-word instruction keep the text
  // gradients well above the rounding noise of the differences.
  route::NavExample ex = *std::min_element(world.nav.begin(), world.nav.end(),
                                           [](const auto& a, const auto& b) { return a.route.size() < b.route.size(); });
  ex.tokens = {3, 1, 4};
  const auto demo = route::demonstration_from_route(world.graph, ex.route, ex.start_heading);
  for (nav::ModelKind kind : {nav::ModelKind::kRConcat, nav::ModelKind::kGA}) {
    const nav::NavModel m(nav_toy(kind, world.vocab.size()));
    // Per-step terms of the negative log-likelihood.
    auto loss = [&](const Bindings& p) {
      auto terms = nav::demonstration_log_probs(m, p, {world.graph, features, ex}, demo, 16);
      for (auto& t : terms) t = scale(t, -1.0);
      return terms;
    };
    out.push_back(check_smooth_instance(std::string(nav::to_string(kind)), loss,
                                        [&](ParamStore& store) { m.init(store, rng); }));
  }
  return out;
}

}  // namespace streetnav::harness
