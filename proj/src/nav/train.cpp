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
#include "streetnav/nav/train.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "streetnav/common/early_stopping.hpp"
#include "streetnav/common/error.hpp"

namespace streetnav::nav {

std::vector<metrics::NavEvalRecord> evaluate_nav(Policy& policy, const env::PanoGraph& graph,
                                                 const sdr::FeatureLookup& features,
                                                 std::span<const route::NavExample> examples, std::size_t horizon,
                                                 DecodeMode mode, Rng& rng) {
  std::vector<metrics::NavEvalRecord> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    const Episode episode{graph, features, ex};
    out.push_back({rollout(policy, episode, horizon, mode, rng),
                   route::demonstration_from_route(graph, ex.route, ex.start_heading), ex.goal});
  }
  return out;
}

TrainResult train_nav(const NavModel& model, ParamStore params, std::span<const route::NavExample> train,
                      std::span<const route::NavExample> dev, const env::PanoGraph& graph,
                      const sdr::FeatureLookup& features, const TrainConfig& config, Rng& rng,
                      const std::function<void(const EpochStats&)>& on_epoch) {
  if (train.empty()) throw PreconditionError("train_nav: empty training set");
  if (dev.empty()) throw PreconditionError("train_nav: empty development set");
  if (config.workers == 0) throw PreconditionError("train_nav: workers must be positive");

  std::vector<env::Execution> demos;
  demos.reserve(train.size());
  for (const auto& ex : train) demos.push_back(route::demonstration_from_route(graph, ex.route, ex.start_heading));

  const tensor::AdamConfig adam{config.lr, config.beta1, config.beta2, config.eps};
  TrainResult result{params, {}, 0};
  EarlyStopper stopper(config.patience);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  // One worker's pass over order[begin, end).
  auto run_shard = [&](std::size_t begin, std::size_t end, double& total) {
    Bindings b = params.bind();
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t i = order[k];
      params.pull(b);
      const Episode episode{graph, features, train[i]};
      Tensor loss = demonstration_nll(model, b, episode, demos[i], config.crop_width);
      if (!std::isfinite(loss.item())) {
        throw NumericError("train_nav: non-finite loss on example '" + train[i].id + "'");
      }
      total += loss.item();
      loss.backward();
      params.adam_step(b, adam);
    }
  };

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    if (config.workers == 1) {
      run_shard(0, order.size(), total);
    } else {
      const std::size_t n = config.workers;
      std::vector<double> totals(n, 0.0);
      std::vector<std::exception_ptr> errors(n);
      std::vector<std::thread> threads;
      for (std::size_t w = 0; w < n; ++w) {
        const std::size_t begin = order.size() * w / n, end = order.size() * (w + 1) / n;
        threads.emplace_back([&, w, begin, end] {
          try {
            run_shard(begin, end, totals[w]);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : threads) t.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
      total = std::accumulate(totals.begin(), totals.end(), 0.0);
    }

    // Coordinator evaluation on dev after every epoch-equivalent.
    LearnedPolicy policy(model, params, config.crop_width);
    const auto records = evaluate_nav(policy, graph, features, dev, config.horizon_test, DecodeMode::kGreedy, rng);
    EpochStats stats{epoch, total / static_cast<double>(train.size()), metrics::spd(records, graph),
                     metrics::tc_rate(records, graph), false};
    stats.improved = stopper.update(-stats.dev_spd);
    if (stats.improved) {
      result.best = params;
      result.best_epoch = epoch;
    }
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (stopper.should_stop()) break;
  }
  return result;
}

}  // namespace streetnav::nav
