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
// Acceptance runner: checks every release criterion and prints one PASS or
// FAIL line per criterion. Arguments select criteria by number; none runs
// all. Exit status is 0 only if every selected criterion passes.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streetnav/common/error.hpp"
#include "streetnav/env/graph.hpp"
#include "streetnav/harness/config.hpp"
#include "streetnav/harness/experiment.hpp"
#include "streetnav/harness/gradcheck_suite.hpp"
#include "streetnav/harness/report.hpp"
#include "streetnav/metrics/metrics.hpp"
#include "streetnav/nav/models.hpp"
#include "streetnav/nav/policy.hpp"
#include "streetnav/nav/train.hpp"
#include "streetnav/route/world.hpp"
#include "streetnav/route/world_io.hpp"
#include "streetnav/sdr/models.hpp"
#include "streetnav/sdr/targets.hpp"
#include "streetnav/sdr/train.hpp"
#include "streetnav/tensor/ops.hpp"
#include "streetnav/tensor/param_store.hpp"
#include "../support/oracles.hpp"

#ifndef STREETNAV_CLI
#error "STREETNAV_CLI must name the command-line binary"
#endif

namespace streetnav::acceptance {
namespace {

namespace fs = std::filesystem;
using env::Action;
using env::Execution;
using env::NodeIndex;
using env::PanoGraph;
using env::State;
using tensor::Tensor;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch_root() {
  static const fs::path root = [] {
    fs::path p = fs::temp_directory_path() / ("streetnav_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << bytes;
}

std::map<std::string, std::shared_ptr<const sdr::FeatureMap>> shared_features(const route::World& w) {
  std::map<std::string, std::shared_ptr<const sdr::FeatureMap>> out;
  for (const auto& [id, f] : w.features) out[id] = std::make_shared<const sdr::FeatureMap>(f);
  return out;
}

sdr::FeatureLookup lookup_in(const std::map<std::string, std::shared_ptr<const sdr::FeatureMap>>& maps) {
  return [&maps](const std::string& id) { return maps.at(id); };
}

template <typename T>
std::vector<T> in_split(const std::vector<T>& all, const std::string& split) {
  std::vector<T> out;
  for (const auto& e : all)
    if (e.split == split) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// 1. Transition semantics.

Outcome transitions() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::size_t states = 0, violations = 0;
  for (int g = 0; g < 1000; ++g) {
    const PanoGraph graph = testing::random_graph(rng, 50, g % 4 != 0);
    for (std::uint32_t n = 0; n < graph.num_nodes(); ++n) {
      const auto edges = graph.edges(NodeIndex{n});
      for (const auto& e : edges) {
        const State s{NodeIndex{n}, e.heading};
        ++states;
        for (Action a : env::kAllActions) violations += !graph.is_valid(env::transition(graph, s, a));
        violations += env::transition(graph, env::transition(graph, s, Action::kRight), Action::kLeft) != s;
        violations += env::transition(graph, env::transition(graph, s, Action::kLeft), Action::kRight) != s;
        State t = s;
        for (std::size_t k = 0; k < edges.size(); ++k) {
          t = env::transition(graph, t, Action::kLeft);
          // Fewer than k turns must not return early, or LEFT is not a k-cycle.
          if (k + 1 < edges.size() && t == s) ++violations;
        }
        violations += t != s;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 10.0,
          fmt("%zu states on 1000 graphs, %zu violations, %.2fs", states, violations, secs)};
}

// ---------------------------------------------------------------------------
// 2. Metric oracles.

Execution random_walk(const PanoGraph& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(g.num_nodes() - 1));
  const NodeIndex start{node(rng)};
  const auto edges = g.edges(start);
  State s{start, edges[std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng)].heading};
  Execution e;
  const std::size_t len = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
  std::uniform_int_distribution<int> act(0, 2);
  for (std::size_t i = 0; i < len; ++i) {
    const Action a = env::kAllActions[act(rng)];
    e.steps.push_back({s, a});
    s = env::transition(g, s, a);
  }
  e.steps.push_back({s, Action::kStop});
  return e;
}

std::vector<NodeIndex> visited_panoramas(const Execution& e) {
  std::vector<NodeIndex> out;
  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    if (i == 0 || e.steps[i].state.pano != e.steps[i - 1].state.pano) out.push_back(e.steps[i].state.pano);
  }
  return out;
}

Outcome metric_oracles() {
  std::mt19937_64 rng(2002);
  std::size_t mismatches = 0, executions = 0;
  for (int g = 0; g < 20; ++g) {
    const PanoGraph graph = testing::random_graph(rng, 30);
    const auto dist = testing::floyd_warshall(graph);
    std::vector<metrics::NavEvalRecord> records;
    double tc = 0, spd = 0, sed = 0;
    for (int i = 0; i < 10; ++i, ++executions) {
      Execution pred = random_walk(graph, rng);
      Execution ref = random_walk(graph, rng);
      const NodeIndex goal = ref.steps.back().state.pano;
      const std::size_t d = dist[pred.steps.back().state.pano.value][goal.value];
      const bool done = d <= 1;
      const auto p = visited_panoramas(pred), r = visited_panoramas(ref);
      const double sim =
          done ? 1.0 - static_cast<double>(testing::brute_levenshtein(p, r)) /
                           static_cast<double>(std::max(p.size(), r.size()))
               : 0.0;
      const metrics::NavEvalRecord one{pred, ref, goal};
      const std::span<const metrics::NavEvalRecord> single(&one, 1);
      mismatches += metrics::tc_rate(single, graph) != (done ? 1.0 : 0.0);
      mismatches += metrics::spd(single, graph) != static_cast<double>(d);
      mismatches += metrics::sed(single, graph) != sim;
      tc += done;
      spd += static_cast<double>(d);
      sed += sim;
      records.push_back(one);
    }
    const double n = static_cast<double>(records.size());
    const auto summary = metrics::summarize_nav(records, graph);
    mismatches += summary.tc != tc / n;
    mismatches += summary.spd != spd / n;
    mismatches += summary.sed != sed / n;
  }

  // Hand case: one inserted detour panorama out of five.
  PanoGraph::Builder b;
  for (auto id : {"p1", "p2", "p3", "p4", "p5"}) b.add_node(id);
  const std::pair<std::pair<const char*, double>, std::pair<const char*, double>> links[] = {
      {{"p1", 90}, {"p2", 270}}, {{"p2", 90}, {"p3", 270}}, {{"p3", 90}, {"p4", 270}},
      {{"p2", 45}, {"p5", 225}}, {{"p5", 135}, {"p3", 315}}};
  for (const auto& [x, y] : links) {
    b.add_half_edge(x.first, x.second, y.first);
    b.add_half_edge(y.first, y.second, x.first);
  }
  const PanoGraph hand = std::move(b).build();
  // Drives the simulator through the given panoramas, turning left in place
  // until the heading leads to the next one.
  auto walk = [&](std::vector<const char*> panos) {
    Execution e;
    State s{hand.index(panos[0]), 90};
    auto push = [&](Action a) {
      e.steps.push_back({s, a});
      s = env::transition(hand, s, a);
    };
    for (std::size_t i = 1; i < panos.size(); ++i) {
      const NodeIndex next = hand.index(panos[i]);
      while (hand.edges(s.pano)[*hand.edge_slot(s.pano, s.heading)].target != next) push(Action::kLeft);
      push(Action::kForward);
    }
    push(Action::kStop);
    env::validate_execution(hand, e);
    return e;
  };
  const std::vector<metrics::NavEvalRecord> hand_case{
      {walk({"p1", "p2", "p5", "p3", "p4"}), walk({"p1", "p2", "p3", "p4"}), hand.index("p4")}};
  const double hand_sed = metrics::sed(hand_case, hand);
  const bool hand_ok = std::abs(hand_sed - 0.8) <= 1e-12;
  return {mismatches == 0 && hand_ok && executions == 200,
          fmt("%zu executions, %zu mismatches; hand case SED %.15f", executions, mismatches, hand_sed)};
}

// ---------------------------------------------------------------------------
// 3. Gradient correctness.

Outcome gradients() {
  const auto t0 = Clock::now();
  const auto entries = harness::run_gradcheck_suite(3003);
  double worst = 0.0;
  std::string worst_name, failed;
  for (const auto& e : entries) {
    if (e.report.max_error >= worst) worst = e.report.max_error, worst_name = e.name;
    if (!e.passed()) failed += " " + e.name;
  }
  const double secs = seconds_since(t0);
  return {failed.empty() && entries.size() == 11 && secs < 120.0,
          fmt("%zu checks, max relative error %.2e (%s)%s%s, %.1fs", entries.size(), worst, worst_name.c_str(),
              failed.empty() ? "" : ", failed:", failed.c_str(), secs)};
}

// ---------------------------------------------------------------------------
// 4. Adjointness of conv2d and deconv2d.

Tensor random_tensor(tensor::Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(tensor::numel(shape));
  for (double& x : v) x = u(rng);
  return Tensor::from(std::move(shape), std::move(v));
}

double inner(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

Outcome adjointness() {
  std::mt19937_64 rng(4004);
  auto draw = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  double worst = 0.0;
  int done = 0;
  while (done < 100) {
    const std::size_t cin = draw(1, 4), cout = draw(1, 4), kh = draw(1, 5), kw = draw(1, 5);
    const std::size_t stride = draw(1, 3), pad = draw(0, std::min(kh, kw) - 1);
    const std::size_t oh = draw(1, 6), ow = draw(1, 6);
    // Input extents for which the convolution output is exactly (oh, ow).
    const long h = static_cast<long>((oh - 1) * stride + kh) - 2 * static_cast<long>(pad);
    const long w = static_cast<long>((ow - 1) * stride + kw) - 2 * static_cast<long>(pad);
    if (h < 1 || w < 1) continue;
    const Tensor x = random_tensor({cin, static_cast<std::size_t>(h), static_cast<std::size_t>(w)}, rng);
    const Tensor k = random_tensor({cout, cin, kh, kw}, rng);
    const Tensor y = random_tensor({cout, oh, ow}, rng);
    const tensor::Conv2dOptions opt{stride, pad};
    const double lhs = inner(tensor::conv2d(x, k, opt), y);
    const double rhs = inner(x, tensor::deconv2d(y, k, opt));
    worst = std::max(worst, std::abs(lhs - rhs));
    ++done;
  }
  return {worst <= 1e-10, fmt("100 instances, max |<conv(x,K),y> - <x,deconv(y,K)>| = %.2e", worst)};
}

// ---------------------------------------------------------------------------
// 5. Distribution validity.

struct SumCheck {
  double worst = 0.0;
  bool negative_or_nan = false;
  void add(const Tensor& p) {
    double s = 0.0;
    for (double v : p.data()) {
      if (!(v >= 0.0)) negative_or_nan = true;
      s += v;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
};

Outcome distributions() {
  std::mt19937_64 rng(5005);
  auto draw = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  std::uniform_real_distribution<double> init_scale(0.05, 2.0), feature_scale(0.1, 20.0);
  constexpr std::size_t kVocab = 9;
  auto tokens = [&] {
    std::vector<std::size_t> t(draw(1, 8));
    for (auto& id : t) id = draw(0, kVocab - 1);
    return t;
  };
  SumCheck sums;
  std::size_t gaussian_misses = 0, forwards = 0;
  const sdr::ModelKind sdr_kinds[] = {sdr::ModelKind::kLingUNet, sdr::ModelKind::kUNet, sdr::ModelKind::kConcat,
                                      sdr::ModelKind::kConcatConv, sdr::ModelKind::kText2Conv};
  for (std::size_t i = 0; i < 1000; ++i) {
    Rng init(static_cast<std::uint64_t>(i));
    tensor::ParamStore store;
    if (i % 7 < 5) {
      sdr::ModelConfig c;
      c.kind = sdr_kinds[i % 7];
      c.channels = draw(1, 4);
      c.levels = draw(1, 3);
      c.level_channels.clear();
      for (std::size_t k = 0; k < c.levels; ++k) c.level_channels.push_back(draw(1, 4));
      c.mlp_hidden = draw(1, 6);
      c.text = {kVocab, draw(1, 4), c.levels * draw(1, 2)};
      c.init_scale = init_scale(rng);
      const sdr::SdrModel model(c);
      model.init(store, init);
      const double scale = feature_scale(rng);
      Tensor f = random_tensor({c.channels, draw(2, 10), draw(2, 14)}, rng);
      f = tensor::scale(f, scale);
      sums.add(model.distribution(store.bind(), f, tokens()));
      ++forwards;
    } else {
      nav::ModelConfig c;
      c.kind = i % 7 == 5 ? nav::ModelKind::kRConcat : nav::ModelKind::kGA;
      c.ablation = std::array{nav::Ablation::kNone, nav::Ablation::kNoText, nav::Ablation::kNoImage}[draw(0, 2)];
      c.obs_height = 16;
      c.obs_width = 16;
      c.convs = {{draw(1, 4), 4, 2}, {draw(1, 4), 3, 2}};
      c.image_dim = draw(1, 8);
      c.ga_hidden = draw(1, 8);
      c.text = {kVocab, draw(1, 5), draw(1, 6)};
      c.action_dim = draw(1, 4);
      c.time_dim = draw(1, 4);
      c.lstm_hidden = draw(1, 8);
      c.horizon = 5;
      c.init_scale = init_scale(rng);
      const nav::NavModel model(c);
      model.init(store, init);
      const auto params = store.bind();
      auto carry = model.begin(params, tokens());
      for (std::size_t t = 0; t < 8; ++t) {
        const Tensor obs = tensor::scale(random_tensor({16, 16}, rng), feature_scale(rng));
        sums.add(tensor::softmax(model.step_logits(params, carry, obs, t)));
        carry.prev = env::kAllActions[draw(0, 2)];
        ++forwards;
      }
    }

    // Gaussian target peaks at the target's cell.
    const sdr::GridSpec grid{draw(1, 20), draw(1, 40), std::array{1.0, 2.5, 4.0, 8.0}[draw(0, 3)]};
    std::uniform_real_distribution<double> xs(0.0, grid.image_width()), ys(0.0, grid.image_height());
    const metrics::Point target{xs(rng), ys(rng)};
    const Tensor g = sdr::gaussian_target(target, grid, std::uniform_real_distribution<double>(0.3, 6.0)(rng));
    sums.add(g);
    std::size_t best = 0;
    for (std::size_t k = 1; k < g.numel(); ++k)
      if (g.data()[k] > g.data()[best]) best = k;
    const auto row = static_cast<std::size_t>(std::floor(target.y / grid.scale));
    const auto col = static_cast<std::size_t>(std::floor(target.x / grid.scale));
    gaussian_misses += best != row * grid.width + col;
  }
  return {sums.worst <= 1e-9 && !sums.negative_or_nan && gaussian_misses == 0,
          fmt("1000 cases, %zu model distributions, max |sum - 1| = %.2e, gaussian argmax misses %zu", forwards,
              sums.worst, gaussian_misses)};
}

// ---------------------------------------------------------------------------
// 6. SDR learning separation.

Outcome sdr_separation() {
  const auto t0 = Clock::now();
  const route::WorldConfig wc;  // 500 train / 100 dev, 16 x 32 grids, vocabulary 20
  const route::World world = route::generate_world(wc);
  const auto train = in_split(world.sdr, "train"), dev = in_split(world.sdr, "dev");
  const auto maps = shared_features(world);
  const auto features = lookup_in(maps);
  const sdr::GridSpec grid = world.grid();
  const double one_cell = grid.scale;

  sdr::TrainConfig tc;
  tc.lr = 0.002;
  tc.sigma = 1.0;
  tc.early_stop_radius = one_cell;
  tc.max_epochs = 20;
  tc.patience = 20;
  auto train_eval = [&](sdr::ModelKind kind) {
    sdr::ModelConfig c;
    c.kind = kind;
    c.channels = wc.marker_classes + wc.noise_channels;
    c.levels = 2;
    c.level_channels = {8, 8};
    c.mlp_hidden = 16;
    c.text = {world.vocab.size(), 16, 16};
    const sdr::SdrModel model(c);
    tensor::ParamStore store;
    Rng rng(6006);
    model.init(store, rng);
    const auto result = sdr::train_sdr(model, store, train, dev, features, grid, tc, rng);
    const auto records = sdr::evaluate_sdr(model, result.best, dev, features, grid);
    return metrics::sdr_accuracy(records, one_cell);
  };
  const double lingunet = train_eval(sdr::ModelKind::kLingUNet);
  const double unet = train_eval(sdr::ModelKind::kUNet);
  std::vector<metrics::Point> gold;
  for (const auto& e : train) gold.push_back(e.target);
  double worst_baseline = 0.0;
  std::string baselines;
  for (const char* name : {"random", "center", "average"}) {
    Rng rng(6007);
    const auto records = sdr::evaluate_baseline(sdr::parse_baseline(name), train, dev, grid, rng);
    const double acc = metrics::sdr_accuracy(records, one_cell);
    worst_baseline = std::max(worst_baseline, acc);
    baselines += fmt(" %s %.1f%%", name, 100 * acc);
  }
  const double secs = seconds_since(t0);
  return {lingunet >= 0.80 && worst_baseline <= 0.15 && unet <= lingunet / 2 && secs < 600.0,
          fmt("dev accuracy@1 cell: lingunet %.1f%%, unet %.1f%%,%s; %.0fs", 100 * lingunet, 100 * unet,
              baselines.c_str(), secs)};
}

// ---------------------------------------------------------------------------
// 7. Navigation memorization.

Outcome nav_memorization() {
  const auto t0 = Clock::now();
  route::WorldConfig wc;
  wc.sdr_train = 20;
  wc.sdr_dev = 10;
  wc.nav_train = 20;
  wc.nav_dev = 10;
  wc.nav_test = 5;
  const route::World world = route::generate_world(wc);
  const auto train = in_split(world.nav, "train");
  const auto maps = shared_features(world);
  const auto features = lookup_in(maps);

  nav::ModelConfig c;
  c.obs_height = wc.feature_height;
  c.obs_width = 16;
  c.convs = {{4, 4, 2}, {8, 3, 2}};
  c.image_dim = 16;
  c.text = {world.vocab.size(), 16, 32};
  c.action_dim = 8;
  c.time_dim = 8;
  c.lstm_hidden = 32;
  const nav::NavModel model(c);
  tensor::ParamStore store;
  Rng rng(7007);
  model.init(store, rng);
  nav::TrainConfig tc;
  tc.lr = 0.002;
  tc.max_epochs = 300;
  tc.patience = 300;
  tc.crop_width = c.obs_width;
  const auto result = nav::train_nav(model, store, train, train, world.graph, features, tc, rng);
  nav::LearnedPolicy policy(model, result.best, tc.crop_width);
  const auto learned = nav::evaluate_nav(policy, world.graph, features, train, nav::kTestHorizon,
                                         nav::DecodeMode::kGreedy, rng);
  const double learned_tc = metrics::tc_rate(learned, world.graph);

  auto stop = nav::make_baseline(nav::BaselineKind::kStop);
  const auto stopped = nav::evaluate_nav(*stop, world.graph, features, train, nav::kTestHorizon,
                                         nav::DecodeMode::kGreedy, rng);
  const auto dist = testing::floyd_warshall(world.graph);
  double total = 0.0;
  for (const auto& e : train) total += static_cast<double>(dist[e.start_pano.value][e.goal.value]);
  const double mean_hops = total / static_cast<double>(train.size());
  const auto stop_summary = metrics::summarize_nav(stopped, world.graph);
  const double secs = seconds_since(t0);
  return {train.size() == 20 && learned_tc >= 0.90 && stop_summary.tc == 0.0 && stop_summary.spd == mean_hops,
          fmt("rconcat train TC %.0f%% (best epoch %zu of %zu); stop TC %.0f%%, SPD %.4f vs mean start-goal %.4f; "
              "%.0fs",
              100 * learned_tc, result.best_epoch, result.history.size(), 100 * stop_summary.tc, stop_summary.spd,
              mean_hops, secs)};
}

// ---------------------------------------------------------------------------
// 8. Ablation invariances.

std::vector<double> log_probs(const nav::NavModel& model, const tensor::ParamStore& store,
                              const nav::Episode& episode, const Execution& demo) {
  std::vector<double> out;
  for (const Tensor& t : nav::demonstration_log_probs(model, store.bind(), episode, demo, model.config().obs_width))
    out.push_back(t.item());
  return out;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Outcome ablations() {
  route::WorldConfig wc;
  wc.seed = 11;
  wc.grid_rows = 6;
  wc.grid_cols = 6;
  wc.sdr_train = 10;
  wc.sdr_dev = 4;
  wc.nav_train = 6;
  wc.nav_dev = 3;
  wc.nav_test = 3;
  const route::World world = route::generate_world(wc);
  const auto maps = shared_features(world);
  const auto features = lookup_in(maps);
  const route::NavExample& base = world.nav.front();
  const Execution demo = route::demonstration_from_route(world.graph, base.route, base.start_heading);
  std::mt19937_64 rng(8008);
  std::uniform_int_distribution<std::size_t> token(0, world.vocab.size() - 1), length(1, 12);
  std::uniform_real_distribution<float> value(-3.0f, 3.0f);

  std::size_t broken = 0, sensitive_text = 0, sensitive_image = 0, comparisons = 0;
  for (nav::ModelKind kind : {nav::ModelKind::kRConcat, nav::ModelKind::kGA}) {
    for (nav::Ablation ablation : {nav::Ablation::kNoText, nav::Ablation::kNoImage}) {
      nav::ModelConfig c;
      c.kind = kind;
      c.ablation = ablation;
      c.obs_height = wc.feature_height;
      c.obs_width = 16;
      c.convs = {{3, 4, 2}, {4, 3, 2}};
      c.image_dim = 6;
      c.ga_hidden = 5;
      c.text = {world.vocab.size(), 4, 5};
      c.action_dim = 3;
      c.time_dim = 3;
      c.lstm_hidden = 6;
      c.init_scale = 0.5;
      const nav::NavModel model(c);
      tensor::ParamStore store;
      Rng init(8009);
      model.init(store, init);
      const auto reference = log_probs(model, store, {world.graph, features, base}, demo);
      for (int trial = 0; trial < 100; ++trial, ++comparisons) {
        route::NavExample perturbed = base;
        std::map<std::string, std::shared_ptr<const sdr::FeatureMap>> other = maps;
        if (ablation == nav::Ablation::kNoText) {
          perturbed.tokens.resize(length(rng));
          for (auto& t : perturbed.tokens) t = token(rng);
        } else {
          for (auto& [id, f] : other) {
            auto g = std::make_shared<sdr::FeatureMap>(*f);
            for (std::size_t ch = 0; ch < g->channels(); ++ch)
              for (std::size_t y = 0; y < g->height(); ++y)
                for (std::size_t x = 0; x < g->width(); ++x) g->at(ch, y, x) = value(rng);
            f = g;
          }
        }
        const auto other_features = lookup_in(other);
        broken += !bitwise_equal(log_probs(model, store, {world.graph, other_features, perturbed}, demo), reference);
        // The input that is not ablated must still matter.
        if (ablation == nav::Ablation::kNoText && trial < 5) {
          std::map<std::string, std::shared_ptr<const sdr::FeatureMap>> shifted = maps;
          for (auto& [id, f] : shifted) {
            auto g = std::make_shared<sdr::FeatureMap>(*f);
            g->at(0, 0, 0) += 1.0f + static_cast<float>(trial);
            for (std::size_t y = 0; y < g->height(); ++y) g->at(0, y, (trial * 7) % g->width()) += 2.0f;
            f = g;
          }
          const auto shifted_features = lookup_in(shifted);
          sensitive_image += !bitwise_equal(log_probs(model, store, {world.graph, shifted_features, base}, demo),
                                            reference);
        }
        if (ablation == nav::Ablation::kNoImage && kind == nav::ModelKind::kRConcat && trial < 5) {
          sensitive_text += !bitwise_equal(log_probs(model, store, {world.graph, features, perturbed}, demo),
                                           reference) ||
                            perturbed.tokens == base.tokens;
        }
      }
    }
  }
  // A text-blind SDR model is invariant to tokens as well.
  sdr::ModelConfig sc;
  sc.kind = sdr::ModelKind::kUNet;
  sc.channels = wc.marker_classes + wc.noise_channels;
  sc.level_channels = {3, 2};
  sc.mlp_hidden = 6;
  const sdr::SdrModel unet(sc);
  tensor::ParamStore unet_store;
  Rng init(8010);
  unet.init(unet_store, init);
  const Tensor f = world.features.begin()->second.to_tensor();
  const Tensor ref = unet.distribution(unet_store.bind(), f, base.tokens);
  const std::vector<double> unet_ref(ref.data().begin(), ref.data().end());
  for (int trial = 0; trial < 100; ++trial, ++comparisons) {
    std::vector<std::size_t> t(length(rng));
    for (auto& id : t) id = token(rng);
    const Tensor d = unet.distribution(unet_store.bind(), f, t);
    broken += !bitwise_equal({d.data().begin(), d.data().end()}, unet_ref);
  }
  return {broken == 0 && sensitive_image == 10 && sensitive_text == 5,
          fmt("%zu perturbations, %zu output changes; non-ablated inputs change outputs in %zu/15 probes",
              comparisons, broken, sensitive_image + sensitive_text)};
}

// ---------------------------------------------------------------------------
// 9. Determinism of command reports.

std::string without_wall_clock(const std::string& report) {
  std::istringstream in(report);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("\"wall_clock_seconds\"") == std::string::npos) out += line + "\n";
  return out;
}

Outcome determinism() {
  const fs::path dir = scratch_root() / "determinism";
  fs::create_directories(dir);
  const fs::path config = dir / "run.cfg";
  std::ofstream(config) << "# small world, short training\n"
                        << "data = " << (dir / "world").string() << "\n"
                        << "sdr.checkpoint = " << (dir / "sdr.ckpt").string() << "\n"
                        << "nav.checkpoint = " << (dir / "nav.ckpt").string() << "\n"
                        << "world.grid_rows = 6\nworld.grid_cols = 6\n"
                        << "world.sdr_train = 20\nworld.sdr_dev = 8\n"
                        << "world.nav_train = 6\nworld.nav_dev = 3\nworld.nav_test = 3\n"
                        << "sdr.channels = 4\nsdr.mlp_hidden = 8\nsdr.embedding_dim = 4\nsdr.text_hidden = 4\n"
                        << "sdr.epochs = 2\n"
                        << "nav.crop_width = 16\nnav.convs = 3x4/2,4x3/2\nnav.image_dim = 6\n"
                        << "nav.embedding_dim = 4\nnav.text_hidden = 5\nnav.lstm_hidden = 6\n"
                        << "nav.action_dim = 3\nnav.time_dim = 3\nnav.epochs = 2\n";
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"gen-world", "gen-world"},
      {"train-sdr", "train-sdr"},
      {"eval-sdr", "eval-sdr"},
      {"eval-sdr-random", "eval-sdr --set sdr.model=random"},
      {"train-nav", "train-nav"},
      {"train-nav-ga", "train-nav --set nav.model=ga --set nav.checkpoint=" + (dir / "ga.ckpt").string()},
      {"eval-nav", "eval-nav"},
      {"eval-nav-sample", "eval-nav --set nav.decode=sample"},
      {"eval-nav-random", "eval-nav --set nav.model=random"},
      {"full-task", "full-task --set split=test"},
      {"gradcheck", "gradcheck"},
  };
  std::size_t identical = 0, failures = 0;
  std::string differing;
  std::map<std::string, std::string> first;
  for (int round = 0; round < 2; ++round) {
    for (const auto& [name, args] : runs) {
      const fs::path out = dir / (name + "." + std::to_string(round) + ".json");
      const std::string cmd = std::string(STREETNAV_CLI) + " " + args + " --config " + config.string() +
                              " --deterministic --seed 17 --workers 3 --quiet --out " + out.string() +
                              " > /dev/null 2> " + (dir / "stderr.txt").string();
      if (std::system(cmd.c_str()) != 0 || !fs::exists(out)) {
        ++failures;
        differing += " " + name + "(exit)";
        continue;
      }
      const std::string text = without_wall_clock(read_file(out));
      if (round == 0) {
        first[name] = text;
      } else if (first[name] == text) {
        ++identical;
      } else {
        differing += " " + name;
      }
    }
    if (round == 0) {
      fs::copy_file(dir / "sdr.ckpt", dir / "sdr.ckpt.0", fs::copy_options::overwrite_existing);
      fs::copy_file(dir / "nav.ckpt", dir / "nav.ckpt.0", fs::copy_options::overwrite_existing);
    }
  }
  const bool checkpoints_same = read_file(dir / "sdr.ckpt") == read_file(dir / "sdr.ckpt.0") &&
                                read_file(dir / "nav.ckpt") == read_file(dir / "nav.ckpt.0");
  return {failures == 0 && identical == runs.size() && checkpoints_same,
          fmt("%zu/%zu command reports byte-identical across two runs, checkpoints %s%s%s", identical, runs.size(),
              checkpoints_same ? "identical" : "differ", differing.empty() ? "" : "; differing:", differing.c_str())};
}

// ---------------------------------------------------------------------------
// 10. Format round trips and corrupted inputs.

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::set<fs::path> names_a, names_b;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) names_a.insert(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) names_b.insert(fs::relative(e.path(), b));
  if (names_a != names_b) return false;
  files = names_a.size();
  for (const auto& n : names_a)
    if (read_file(a / n) != read_file(b / n)) return false;
  return true;
}

std::string replace_first(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  if (pos == std::string::npos) throw std::runtime_error("corpus: pattern not found: " + from);
  return text.replace(pos, from.size(), to);
}

void edit(const fs::path& p, const std::string& from, const std::string& to) {
  write_file(p, replace_first(read_file(p), from, to));
}

void append(const fs::path& p, const std::string& text) { write_file(p, read_file(p) + text); }

// Rewrites the first JSON line of a .jsonl file.
void edit_first_record(const fs::path& p, const std::function<void(nlohmann::json&)>& change) {
  const std::string text = read_file(p);
  const auto eol = text.find('\n');
  nlohmann::json j = nlohmann::json::parse(text.substr(0, eol));
  change(j);
  write_file(p, j.dump() + text.substr(eol));
}

void poke(const fs::path& p, std::size_t offset, const std::string& bytes) {
  std::string data = read_file(p);
  data.replace(offset, bytes.size(), bytes);
  write_file(p, data);
}

std::string u32_bytes(std::uint32_t v) {
  return {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff), static_cast<char>((v >> 16) & 0xff),
          static_cast<char>(v >> 24)};
}

struct CorruptCase {
  std::string name;
  std::function<void(const fs::path&)> mutate;  // applied to a copy of a valid dataset
};

// Outcome of running `body` in a child process: 0 diagnostic, 1 accepted,
// 2 non-diagnostic exception, 3 empty diagnostic, -1 crash.
int run_isolated(const std::function<void()>& body) {
  std::fflush(nullptr);
  const pid_t pid = ::fork();
  if (pid < 0) throw Error("fork failed");
  if (pid == 0) {
    int code = 1;
    try {
      body();
    } catch (const Error& e) {
      code = std::strlen(e.what()) > 0 ? 0 : 3;
    } catch (...) {
      code = 2;
    }
    ::_exit(code);
  }
  int status = 0;
  ::waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome formats() {
  const fs::path root = scratch_root() / "formats";
  route::WorldConfig wc;
  wc.seed = 12;
  wc.grid_rows = 5;
  wc.grid_cols = 5;
  wc.sdr_train = 12;
  wc.sdr_dev = 4;
  wc.nav_train = 4;
  wc.nav_dev = 2;
  wc.nav_test = 2;
  const route::World world = route::generate_world(wc);
  route::save_world(world, root / "a");
  route::save_world(route::load_world(root / "a"), root / "b");
  std::size_t files = 0;
  const bool round_trip = same_tree(root / "a", root / "b", files);

  const fs::path fmap = fs::path("features") / "n000.fmap";
  const std::vector<CorruptCase> dataset_cases = {
      {"empty node list", [](const fs::path& d) { write_file(d / "nodes.txt", ""); }},
      {"duplicate node", [](const fs::path& d) { append(d / "nodes.txt", "n000\n"); }},
      {"node id with space", [](const fs::path& d) { append(d / "nodes.txt", "n 999\n"); }},
      {"node without edges", [](const fs::path& d) { append(d / "nodes.txt", "n999\n"); }},
      {"missing node file", [](const fs::path& d) { fs::remove(d / "nodes.txt"); }},
      {"link with two fields", [](const fs::path& d) { append(d / "links.tsv", "n000\t10\n"); }},
      {"link heading not a number", [](const fs::path& d) { append(d / "links.tsv", "n000\tnorth\tn001\n"); }},
      {"link heading 360", [](const fs::path& d) { append(d / "links.tsv", "n000\t360\tn001\n"); }},
      {"link to unknown node", [](const fs::path& d) { append(d / "links.tsv", "n000\t33\tzzz\n"); }},
      {"duplicate heading",
       [](const fs::path& d) {
         const std::string t = read_file(d / "links.tsv");
         append(d / "links.tsv", t.substr(0, t.find('\n') + 1));
       }},
      {"missing reverse edge",
       [](const fs::path& d) {
         const std::string t = read_file(d / "links.tsv");
         write_file(d / "links.tsv", t.substr(t.find('\n') + 1));
       }},
      {"missing link file", [](const fs::path& d) { fs::remove(d / "links.tsv"); }},
      {"binary link file", [](const fs::path& d) { write_file(d / "links.tsv", std::string("\0\xff\xfe\n", 4)); }},
      {"vocabulary without unk", [](const fs::path& d) { edit(d / "vocab.txt", "<unk>", "unk"); }},
      {"duplicate token", [](const fs::path& d) { append(d / "vocab.txt", "the\n"); }},
      {"empty vocabulary", [](const fs::path& d) { write_file(d / "vocab.txt", ""); }},
      {"vocabulary too small for token ids", [](const fs::path& d) { write_file(d / "vocab.txt", "<unk>\nthe\n"); }},
      {"meta not JSON", [](const fs::path& d) { write_file(d / "meta.json", "{"); }},
      {"meta schema version", [](const fs::path& d) { edit(d / "meta.json", "\"schema_version\": 1", "\"schema_version\": 2"); }},
      {"negative grid height", [](const fs::path& d) { edit(d / "meta.json", "\"height\": 16", "\"height\": -16"); }},
      {"grid disagrees with features", [](const fs::path& d) { edit(d / "meta.json", "\"height\": 16", "\"height\": 8"); }},
      {"zero image scale",
       [](const fs::path& d) {
         nlohmann::json j = nlohmann::json::parse(read_file(d / "meta.json"));
         j["grid"]["image_scale"] = 0.0;
         write_file(d / "meta.json", j.dump(2));
       }},
      {"generator field of wrong type", [](const fs::path& d) { edit(d / "meta.json", "\"seed\": 12", "\"seed\": \"twelve\""); }},
      {"missing meta", [](const fs::path& d) { fs::remove(d / "meta.json"); }},
      {"feature magic", [fmap](const fs::path& d) { poke(d / fmap, 0, "XXXX"); }},
      {"truncated features",
       [fmap](const fs::path& d) {
         const std::string t = read_file(d / fmap);
         write_file(d / fmap, t.substr(0, t.size() / 2));
       }},
      {"trailing feature bytes", [fmap](const fs::path& d) { append(d / fmap, "tail"); }},
      {"zero feature channels", [fmap](const fs::path& d) { poke(d / fmap, 4, u32_bytes(0)); }},
      {"NaN feature value", [fmap](const fs::path& d) { poke(d / fmap, 16, u32_bytes(0x7fc00000u)); }},
      {"huge feature extent", [fmap](const fs::path& d) { poke(d / fmap, 8, u32_bytes(0xffffffffu)); }},
      {"missing feature file", [fmap](const fs::path& d) { fs::remove(d / fmap); }},
      {"navigation line not JSON", [](const fs::path& d) { append(d / "nav.jsonl", "{\"id\":\n"); }},
      {"navigation without route", [](const fs::path& d) { edit_first_record(d / "nav.jsonl", [](auto& j) { j.erase("route"); }); }},
      {"navigation unknown start", [](const fs::path& d) { edit_first_record(d / "nav.jsonl", [](auto& j) { j["start_pano"] = "zzz"; }); }},
      {"start heading off every edge", [](const fs::path& d) { edit_first_record(d / "nav.jsonl", [](auto& j) { j["start_heading"] = 1.2345; }); }},
      {"token id out of range", [](const fs::path& d) { edit_first_record(d / "nav.jsonl", [](auto& j) { j["tokens"] = {999}; }); }},
      {"negative token id", [](const fs::path& d) { edit_first_record(d / "nav.jsonl", [](auto& j) { j["tokens"] = {-1}; }); }},
      {"empty token list", [](const fs::path& d) { edit_first_record(d / "nav.jsonl", [](auto& j) { j["tokens"] = nlohmann::json::array(); }); }},
      {"reversed route",
       [](const fs::path& d) {
         edit_first_record(d / "nav.jsonl", [](auto& j) {
           auto r = j["route"].template get<std::vector<std::string>>();
           std::reverse(r.begin(), r.end());
           j["route"] = r;
         });
       }},
      {"numeric route entries", [](const fs::path& d) { edit_first_record(d / "nav.jsonl", [](auto& j) { j["route"] = {1, 2}; }); }},
      {"target outside the image", [](const fs::path& d) { edit_first_record(d / "sdr.jsonl", [](auto& j) { j["target_x"] = 1e6; }); }},
      {"target coordinate as text", [](const fs::path& d) { edit_first_record(d / "sdr.jsonl", [](auto& j) { j["target_y"] = "12"; }); }},
      {"SDR unknown panorama", [](const fs::path& d) { edit_first_record(d / "sdr.jsonl", [](auto& j) { j["pano"] = "zzz"; }); }},
      {"SDR without sentence id", [](const fs::path& d) { edit_first_record(d / "sdr.jsonl", [](auto& j) { j.erase("sentence_id"); }); }},
  };

  // Other inputs: configuration files, checkpoints and reports.
  tensor::ParamStore params;
  Rng rng(10010);
  params.add("w", {2, 3}, rng);
  std::ostringstream ckpt;
  params.save(ckpt);
  const std::string checkpoint = ckpt.str();
  harness::Config cfg;
  cfg.set("data", (root / "a").string());
  cfg.set("nav.model", "stop");
  const std::string report = harness::render(harness::run_experiment("eval-nav", cfg));
  auto rescore = [&root, cfg](const std::string& text) mutable {
    write_file(root / "report.json", text);
    cfg.set("input", (root / "report.json").string());
    harness::run_experiment("metrics", cfg);
  };
  const std::vector<std::pair<std::string, std::function<void()>>> other_cases = {
      {"config unknown key", [] { std::istringstream in("seed = 1\nlearning_rate = 3\n"); harness::Config().merge(in, "run.cfg"); }},
      {"config malformed number", [] { std::istringstream in("nav.lr = 1e-3x\n"); harness::Config().merge(in, "run.cfg"); }},
      {"checkpoint magic", [&] { std::istringstream in("XXXX" + checkpoint.substr(4)); tensor::ParamStore::load(in); }},
      {"truncated checkpoint", [&] { std::istringstream in(checkpoint.substr(0, checkpoint.size() - 5)); tensor::ParamStore::load(in); }},
      {"report not JSON", [&] { rescore(report.substr(0, report.size() / 2)); }},
      {"report with unknown action", [&] { rescore(replace_first(report, "\"STOP\"", "\"HALT\"")); }},
  };

  std::size_t diagnosed = 0, total = 0;
  std::string problems;
  auto record = [&](const std::string& name, int code) {
    ++total;
    if (code == 0) ++diagnosed;
    else problems += " " + name + (code < 0 ? "(crash)" : code == 1 ? "(accepted)" : "(no diagnostic)");
  };
  for (std::size_t i = 0; i < dataset_cases.size(); ++i) {
    const fs::path d = root / ("case" + std::to_string(i));
    fs::copy(root / "a", d, fs::copy_options::recursive);
    dataset_cases[i].mutate(d);
    record(dataset_cases[i].name, run_isolated([&] { route::load_world(d); }));
  }
  for (const auto& [name, body] : other_cases) record(name, run_isolated(body));
  return {round_trip && total == 50 && diagnosed == total,
          fmt("save-load-save %s over %zu files; %zu/%zu corrupted inputs diagnosed%s%s",
              round_trip ? "byte-identical" : "differs", files, diagnosed, total, problems.empty() ? "" : ":",
              problems.c_str())};
}

struct Criterion {
  int number;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "transition semantics", transitions},   {2, "metric oracles", metric_oracles},
    {3, "gradient correctness", gradients},     {4, "conv/deconv adjointness", adjointness},
    {5, "distribution validity", distributions}, {6, "SDR learning separation", sdr_separation},
    {7, "navigation memorization", nav_memorization}, {8, "ablation invariances", ablations},
    {9, "determinism", determinism},            {10, "format round trips", formats},
};

}  // namespace
}  // namespace streetnav::acceptance

int main(int argc, char** argv) {
  using namespace streetnav::acceptance;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : kCriteria) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::filesystem::remove_all(scratch_root());
  return failures == 0 ? 0 : 1;
}
