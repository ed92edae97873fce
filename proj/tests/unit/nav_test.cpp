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
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "streetnav/common/error.hpp"
#include "streetnav/nav/models.hpp"
#include "streetnav/nav/observation.hpp"
#include "streetnav/nav/pipeline.hpp"
#include "streetnav/nav/policy.hpp"
#include "streetnav/nav/train.hpp"
#include "streetnav/route/world.hpp"
#include "streetnav/tensor/gradcheck.hpp"
#include "streetnav/tensor/ops.hpp"

namespace streetnav::nav {
namespace {

using env::Action;
using env::NodeIndex;
using Ids = std::vector<std::size_t>;

route::WorldConfig small_world_config() {
  route::WorldConfig c;
  c.seed = 11;
  c.grid_rows = 6;
  c.grid_cols = 6;
  c.sdr_train = 10;
  c.sdr_dev = 4;
  c.nav_train = 6;
  c.nav_dev = 3;
  c.nav_test = 3;
  return c;
}

const route::World& small_world() {
  static const route::World w = route::generate_world(small_world_config());
  return w;
}

sdr::FeatureLookup lookup(const route::World& w) {
  return [&w](const std::string& id) { return std::make_shared<const sdr::FeatureMap>(w.features.at(id)); };
}

std::vector<route::NavExample> split(const route::World& w, const std::string& name) {
  std::vector<route::NavExample> out;
  for (const auto& e : w.nav)
    if (e.split == name) out.push_back(e);
  return out;
}

ModelConfig toy_config(ModelKind kind, std::size_t vocab, Ablation ablation = Ablation::kNone) {
  ModelConfig c;
  c.kind = kind;
  c.ablation = ablation;
  c.obs_height = 16;
  c.obs_width = 16;
  c.convs = {{3, 4, 2}, {4, 3, 2}};
  c.image_dim = 6;
  c.ga_hidden = 5;
  c.text = {vocab, 4, 5};
  c.action_dim = 3;
  c.time_dim = 3;
  c.lstm_hidden = 6;
  c.horizon = 8;
  c.init_scale = 0.5;
  return c;
}

env::PanoGraph line_graph(std::size_t n) {
  env::PanoGraph::Builder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node("p" + std::to_string(i));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    b.add_half_edge("p" + std::to_string(i), 90.0, "p" + std::to_string(i + 1));
    b.add_half_edge("p" + std::to_string(i + 1), 270.0, "p" + std::to_string(i));
  }
  return std::move(b).build();
}

// Replays a fixed action list, then stops.
class ReplayPolicy final : public Policy {
 public:
  explicit ReplayPolicy(std::vector<Action> actions) : actions_(std::move(actions)) {}
  void begin(const Episode&) override {}
  Action act(std::size_t t, const env::State&, DecodeMode, Rng&) override {
    return t < actions_.size() ? actions_[t] : Action::kStop;
  }

 private:
  std::vector<Action> actions_;
};

TEST(HeadingCropTest, CropStartExamples) {
  EXPECT_EQ(crop_start(32, 0.0, 16), 24u);
  EXPECT_EQ(crop_start(32, 180.0, 16), 8u);
  EXPECT_EQ(crop_start(32, 90.0, 16), 0u);
  EXPECT_EQ(crop_start(32, 359.0, 16), 24u);  // rounds to column 32 == 0
  // Opposite headings are half a panorama apart.
  for (double h = 0; h < 180; h += 7.5) {
    const std::size_t a = crop_start(400, h, 100), b = crop_start(400, h + 180, 100);
    EXPECT_EQ((b + 400 - a) % 400, 200u) << h;
  }
}

TEST(HeadingCropTest, HeadingColumnIsCentred) {
  // Column j of the panorama holds value j in every channel.
  const std::size_t w = 20;
  std::vector<float> data(2 * 3 * w);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t x = 0; x < w; ++x) data[(c * 3 + y) * w + x] = static_cast<float>(x);
  const sdr::FeatureMap pano(2, 3, w, data);
  for (std::size_t cw : {5u, 6u, 20u}) {
    for (double heading : {0.0, 90.0, 200.0, 342.0}) {
      const Tensor crop = heading_crop(pano, heading, cw);
      ASSERT_EQ(crop.shape(), (tensor::Shape{3, cw}));
      const auto col = static_cast<std::size_t>(std::llround(heading * w / 360.0)) % w;
      EXPECT_EQ(crop[cw + cw / 2], static_cast<double>(col)) << cw << " " << heading;
      for (std::size_t j = 0; j < cw; ++j) {
        EXPECT_EQ(crop[j], static_cast<double>((col + w + j - cw / 2) % w));
      }
    }
  }
}

TEST(HeadingCropTest, AveragesChannels) {
  Rng rng(1);
  std::uniform_real_distribution<float> u(0, 1);
  std::vector<float> data(3 * 4 * 8);
  for (auto& v : data) v = u(rng);
  const sdr::FeatureMap pano(3, 4, 8, data);
  const Tensor crop = heading_crop(pano, 45.0, 8);
  const std::size_t start = crop_start(8, 45.0, 8);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t j = 0; j < 8; ++j) {
      double m = 0;
      for (std::size_t c = 0; c < 3; ++c) m += pano.at(c, y, (start + j) % 8);
      EXPECT_NEAR(crop[y * 8 + j], m / 3, 1e-12);
    }
  const sdr::FeatureMap flat(2, 2, 8, std::vector<float>(32, 0.25f));
  const Tensor flat_crop = heading_crop(flat, 123.0, 3);
  for (double v : flat_crop.data()) EXPECT_EQ(v, 0.25);
  EXPECT_THROW(heading_crop(pano, 0.0, 9), PreconditionError);
  EXPECT_THROW(heading_crop(pano, 0.0, 0), PreconditionError);
}

TEST(NavBaselineTest, StopHasZeroCompletionAndStartGoalDistance) {
  const auto& w = small_world();
  const auto features = lookup(w);
  auto policy = make_baseline(BaselineKind::kStop);
  Rng rng(2);
  const auto records = evaluate_nav(*policy, w.graph, features, w.nav, kTestHorizon, DecodeMode::kGreedy, rng);
  double expected = 0;
  for (const auto& ex : w.nav) expected += static_cast<double>(*env::shortest_path_hops(w.graph, ex.start_pano, ex.goal));
  expected /= static_cast<double>(w.nav.size());
  EXPECT_EQ(metrics::tc_rate(records, w.graph), 0.0);
  EXPECT_DOUBLE_EQ(metrics::spd(records, w.graph), expected);
  for (const auto& r : records) EXPECT_EQ(r.predicted.steps.size(), 1u);
}

TEST(NavBaselineTest, FrequentOnLongLineStopsAtHorizon) {
  const auto g = line_graph(60);
  const sdr::FeatureLookup none = [](const std::string&) -> std::shared_ptr<const sdr::FeatureMap> {
    throw LookupError("unused");
  };
  route::NavExample ex;
  ex.id = "line";
  ex.start_pano = g.index("p0");
  ex.start_heading = 90.0;
  ex.goal = g.index("p5");
  ex.route = {g.index("p0"), g.index("p5")};
  auto policy = make_baseline(BaselineKind::kFrequent);
  Rng rng(3);
  const auto e = rollout(*policy, {g, none, ex}, kTestHorizon, DecodeMode::kGreedy, rng);
  EXPECT_EQ(e.final_pano(), g.index("p50"));
  EXPECT_EQ(e.steps.size(), kTestHorizon + 1);
  EXPECT_NO_THROW(env::validate_execution(g, e));
}

TEST(NavBaselineTest, RandomRolloutsAreValidExecutions) {
  const auto& w = small_world();
  const auto features = lookup(w);
  auto policy = make_baseline(BaselineKind::kRandom);
  Rng rng(4);
  for (std::size_t horizon : {0u, 1u, 7u, 50u}) {
    for (const auto& ex : w.nav) {
      const auto e = rollout(*policy, {w.graph, features, ex}, horizon, DecodeMode::kSample, rng);
      EXPECT_NO_THROW(env::validate_execution(w.graph, e));
      EXPECT_LE(e.steps.size(), horizon + 1);
    }
  }
  EXPECT_EQ(parse_baseline("frequent"), BaselineKind::kFrequent);
  EXPECT_THROW(parse_baseline("oracle"), PreconditionError);
}

TEST(NavPolicyTest, ArgmaxAndSampling) {
  EXPECT_EQ(argmax_action({0.1, 0.4, 0.4, 0.1}), Action::kLeft);
  EXPECT_EQ(argmax_action({0.25, 0.25, 0.25, 0.25}), Action::kForward);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_action({0, 0, 1, 0}, rng), Action::kRight);
}

TEST(NavModelTest, LearnedPoliciesGiveDistributions) {
  const auto& w = small_world();
  const auto features = lookup(w);
  Rng rng(6);
  for (ModelKind kind : {ModelKind::kRConcat, ModelKind::kGA}) {
    NavModel m(toy_config(kind, w.vocab.size()));
    ParamStore store;
    m.init(store, rng);
    LearnedPolicy policy(m, store, 16);
    for (const auto& ex : w.nav) {
      policy.begin({w.graph, features, ex});
      env::State s = ex.start();
      for (std::size_t t = 0; t < 12; ++t) {  // beyond the toy horizon of 8
        const ActionProbs p = policy.probabilities(t, s);
        double total = 0;
        for (double v : p) {
          EXPECT_GE(v, 0.0);
          total += v;
        }
        EXPECT_NEAR(total, 1.0, 1e-9);
      }
    }
  }
}

TEST(NavModelTest, RejectsBadConfigurations) {
  ModelConfig c = toy_config(ModelKind::kRConcat, 0);
  EXPECT_THROW(NavModel{c}, PreconditionError);
  c.ablation = Ablation::kNoText;
  EXPECT_NO_THROW(NavModel{c});
  c = toy_config(ModelKind::kGA, 5);
  c.convs = {{3, 20, 1}};
  EXPECT_THROW(NavModel{c}, ShapeError);
  c = toy_config(ModelKind::kGA, 5);
  c.lstm_hidden = 0;
  EXPECT_THROW(NavModel{c}, PreconditionError);
  EXPECT_EQ(parse_model_kind("ga"), ModelKind::kGA);
  EXPECT_EQ(parse_ablation("no_image"), Ablation::kNoImage);
  EXPECT_THROW(parse_ablation("no_audio"), PreconditionError);
}

TEST(NavModelTest, DefaultShapes) {
  ModelConfig c;
  c.text.vocab_size = 10;
  NavModel rc(c);
  ParamStore store;
  Rng rng(7);
  rc.init(store, rng);
  EXPECT_EQ(store.shape("nav.conv1.w"), (tensor::Shape{32, 1, 8, 8}));
  EXPECT_EQ(store.shape("nav.conv2.w"), (tensor::Shape{64, 32, 4, 4}));
  EXPECT_EQ(store.shape("nav.img.w"), (tensor::Shape{256, 64 * 6 * 6}));
  EXPECT_EQ(store.shape("nav.lstm.wi"), (tensor::Shape{4 * 256, 256 + 256 + 16}));
  EXPECT_EQ(store.shape("nav.time_emb"), (tensor::Shape{56, 32}));
  c.kind = ModelKind::kGA;
  NavModel ga(c);
  ParamStore gs;
  ga.init(gs, rng);
  EXPECT_EQ(gs.shape("nav.conv1.w"), (tensor::Shape{128, 1, 8, 8}));
  EXPECT_EQ(gs.shape("nav.img.w"), (tensor::Shape{64, 64 * 11 * 11}));
  EXPECT_EQ(gs.shape("nav.gate.w"), (tensor::Shape{64, 256}));
  EXPECT_EQ(gs.shape("nav.lstm.wi"), (tensor::Shape{4 * 256, 256}));
  EXPECT_FALSE(gs.contains("nav.action_emb"));
}

TEST(NavModelTest, ToyGradientsMatchFiniteDifferences) {
  const auto& w = small_world();
  const auto features = lookup(w);
  const auto& ex = w.nav.front();
  const auto demo = route::demonstration_from_route(w.graph, ex.route, ex.start_heading);
  Rng rng(8);
  for (ModelKind kind : {ModelKind::kRConcat, ModelKind::kGA}) {
    ModelConfig c = toy_config(kind, w.vocab.size());
    c.horizon = 3;
    ASSERT_GT(demo.steps.size(), c.horizon + 1);  // exercises the clamped time embedding
    NavModel m(c);
    ParamStore store;
    m.init(store, rng);
    Bindings b = store.bind();
    auto r = tensor::finite_diff_check(
        [&](const Bindings& p) { return demonstration_nll(m, p, {w.graph, features, ex}, demo, 16); }, b);
    EXPECT_LT(r.max_error, 1e-4) << to_string(kind) << " " << r.worst_input << "[" << r.worst_index
                                 << "] analytic " << r.worst_analytic << " numeric " << r.worst_numeric;
  }
}

TEST(NavModelTest, GateOfZeroWeightsIsOneHalf) {
  NavModel m(toy_config(ModelKind::kGA, 5));
  ParamStore store;
  Rng rng(9);
  m.init(store, rng);
  for (const char* name : {"nav.gate.w", "nav.gate.b"}) {
    for (double& v : store.mutable_value(name)) v = 0.0;
  }
  const Bindings b = store.bind();
  const Tensor g = m.gate(b, Tensor::from({5}, {1, -2, 3, 0, 9}));
  for (double v : g.data()) EXPECT_EQ(v, 0.5);
}

TEST(NavModelTest, AblationsAreBitwiseInvariant) {
  const auto& w = small_world();
  const auto features = lookup(w);
  Rng rng(10);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<std::size_t> tok(0, w.vocab.size() - 1);
  for (ModelKind kind : {ModelKind::kRConcat, ModelKind::kGA}) {
    NavModel no_text(toy_config(kind, w.vocab.size(), Ablation::kNoText));
    NavModel no_image(toy_config(kind, w.vocab.size(), Ablation::kNoImage));
    ParamStore ts, is;
    no_text.init(ts, rng);
    no_image.init(is, rng);
    EXPECT_FALSE(ts.contains("nav.text.embedding"));
    EXPECT_FALSE(is.contains("nav.img.w"));
    const Bindings tb = ts.bind(), ib = is.bind();
    std::vector<double> obs(256);
    for (auto& v : obs) v = u(rng);
    const Tensor base_obs = Tensor::from({16, 16}, obs);
    const Ids base_tokens = {1, 2, 3};
    auto logits = [](const NavModel& m, const Bindings& b, const Ids& tokens, const Tensor& o) {
      auto carry = m.begin(b, tokens);
      std::vector<double> out;
      for (std::size_t t = 0; t < 3; ++t) {
        const Tensor l = m.step_logits(b, carry, o, t);
        out.insert(out.end(), l.data().begin(), l.data().end());
        carry.prev = Action::kLeft;
      }
      return out;
    };
    const auto text_ref = logits(no_text, tb, base_tokens, base_obs);
    const auto image_ref = logits(no_image, ib, base_tokens, base_obs);
    for (int trial = 0; trial < 10; ++trial) {
      Ids tokens(1 + trial % 5);
      for (auto& t : tokens) t = tok(rng);
      for (auto& v : obs) v = u(rng);
      const Tensor o = Tensor::from({16, 16}, obs);
      EXPECT_EQ(logits(no_text, tb, tokens, base_obs), text_ref);
      EXPECT_EQ(logits(no_image, ib, base_tokens, o), image_ref);
      EXPECT_NE(logits(no_text, tb, base_tokens, o), text_ref);
      // Gated attention multiplies text into the image path, so without an
      // image it ignores the text as well.
      if (kind == ModelKind::kRConcat) EXPECT_NE(logits(no_image, ib, tokens, base_obs), image_ref);
    }
  }
}

TEST(NavModelTest, GreedyRolloutsAreReproducible) {
  const auto& w = small_world();
  const auto features = lookup(w);
  Rng init(11);
  NavModel m(toy_config(ModelKind::kRConcat, w.vocab.size()));
  ParamStore store;
  m.init(store, init);
  LearnedPolicy a(m, store, 16), b(m, store, 16);
  Rng r1(1), r2(2);
  for (const auto& ex : w.nav) {
    const auto e1 = rollout(a, {w.graph, features, ex}, kTestHorizon, DecodeMode::kGreedy, r1);
    const auto e2 = rollout(b, {w.graph, features, ex}, kTestHorizon, DecodeMode::kGreedy, r2);
    EXPECT_EQ(e1.steps, e2.steps);
    EXPECT_NO_THROW(env::validate_execution(w.graph, e1));
    EXPECT_LE(e1.steps.size(), kTestHorizon + 1);
  }
}

TEST(NavTrainTest, StopsAfterPatienceWithoutImprovement) {
  const auto& w = small_world();
  const auto features = lookup(w);
  const auto train = split(w, "train"), dev = split(w, "dev");
  NavModel m(toy_config(ModelKind::kRConcat, w.vocab.size()));
  ParamStore store;
  Rng rng(12);
  m.init(store, rng);
  TrainConfig c;
  c.lr = 0.0;  // parameters never change, so only the first epoch improves
  c.max_epochs = 20;
  c.patience = 3;
  c.crop_width = 16;
  const auto r = train_nav(m, store, train, dev, w.graph, features, c, rng);
  ASSERT_EQ(r.history.size(), 4u);
  EXPECT_TRUE(r.history[0].improved);
  EXPECT_EQ(r.best_epoch, 1u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(r.history[i].dev_spd, r.history[0].dev_spd);
}

TEST(NavTrainTest, LearningReducesLikelihoodAndIsReproducible) {
  const auto& w = small_world();
  const auto features = lookup(w);
  const auto train = split(w, "train"), dev = split(w, "dev");
  TrainConfig c;
  c.lr = 0.01;
  c.max_epochs = 15;
  c.patience = 100;
  c.crop_width = 16;
  auto run = [&] {
    NavModel m(toy_config(ModelKind::kRConcat, w.vocab.size()));
    ParamStore store;
    Rng rng(13);
    m.init(store, rng);
    return train_nav(m, store, train, dev, w.graph, features, c, rng);
  };
  const auto a = run(), b = run();
  ASSERT_EQ(a.history.size(), 15u);
  EXPECT_LT(a.history.back().train_nll, 0.5 * a.history.front().train_nll);
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_nll, b.history[i].train_nll);
    EXPECT_EQ(a.history[i].dev_spd, b.history[i].dev_spd);
  }
}

TEST(NavTrainTest, HogwildWorkersTrain) {
  const auto& w = small_world();
  const auto features = lookup(w);
  const auto train = split(w, "train"), dev = split(w, "dev");
  NavModel m(toy_config(ModelKind::kGA, w.vocab.size()));
  ParamStore store;
  Rng rng(14);
  m.init(store, rng);
  TrainConfig c;
  c.lr = 0.01;
  c.max_epochs = 10;
  c.patience = 100;
  c.crop_width = 16;
  c.workers = 3;
  const auto r = train_nav(m, store, train, dev, w.graph, features, c, rng);
  ASSERT_EQ(r.history.size(), 10u);
  for (const auto& s : r.history) EXPECT_TRUE(std::isfinite(s.train_nll));
  EXPECT_LT(r.history.back().train_nll, r.history.front().train_nll);
  c.workers = 0;
  EXPECT_THROW(train_nav(m, store, train, dev, w.graph, features, c, rng), PreconditionError);
}

TEST(FullTaskTest, StoppingOffGoalFailsWhateverTheSdrModel) {
  const auto& w = small_world();
  const auto features = lookup(w);
  sdr::ModelConfig sc;
  sc.kind = sdr::ModelKind::kConcat;
  sc.channels = 4;
  sc.mlp_hidden = 4;
  sc.text = {w.vocab.size(), 4, 4};
  sdr::SdrModel sdr_model(sc);
  ParamStore sp;
  Rng rng(15);
  sdr_model.init(sp, rng);
  std::vector<FullTaskRecord> records;
  for (const auto& target : w.sdr) {
    if (!target.nav_id) continue;
    const auto nav = std::find_if(w.nav.begin(), w.nav.end(), [&](const auto& e) { return e.id == *target.nav_id; });
    ASSERT_NE(nav, w.nav.end());
    ASSERT_EQ(w.graph.id(nav->goal), target.pano);
    const Episode episode{w.graph, features, *nav};

    auto stop = make_baseline(BaselineKind::kStop);
    const auto off = full_task(*stop, episode, sdr_model, sp, target, w.grid(), kTestHorizon, rng);
    EXPECT_FALSE(off.success);
    EXPECT_FALSE(off.predicted.has_value());

    // Replaying the demonstration reaches the goal; success then reduces to
    // SDR correctness at that panorama.
    ReplayPolicy replay(route::demonstration_from_route(w.graph, nav->route, nav->start_heading).actions());
    const auto on = full_task(replay, episode, sdr_model, sp, target, w.grid(), kTestHorizon, rng);
    ASSERT_TRUE(on.predicted.has_value());
    const sdr::SdrExample one[] = {target};
    const auto direct = sdr::evaluate_sdr(sdr_model, sp, one, features, w.grid());
    EXPECT_EQ(on.predicted->x, direct[0].predicted.x);
    EXPECT_EQ(on.predicted->y, direct[0].predicted.y);
    const auto grid_rec = metrics::to_grid(direct, w.grid().scale);
    EXPECT_EQ(on.success, metrics::sdr_correct(grid_rec[0], metrics::grid_radius(kFullTaskRadius, w.grid().scale)));
    records.push_back(on);
    records.push_back(off);
  }
  ASSERT_EQ(records.size(), 6u);
  EXPECT_LE(full_task_accuracy(records), 0.5);
  EXPECT_THROW(full_task_accuracy({}), PreconditionError);
}

}  // namespace
}  // namespace streetnav::nav
