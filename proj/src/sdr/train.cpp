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
#include "streetnav/sdr/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "streetnav/common/early_stopping.hpp"
#include "streetnav/common/error.hpp"

namespace streetnav::sdr {

double default_learning_rate(ModelKind kind) { return kind == ModelKind::kLingUNet ? 0.0005 : 0.001; }

std::vector<metrics::SdrEvalRecord> evaluate_sdr(const SdrModel& model, const ParamStore& params,
                                                 std::span<const SdrExample> examples,
                                                 const FeatureLookup& features, const GridSpec& grid) {
  Bindings b = params.bind();
  std::vector<metrics::SdrEvalRecord> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    Tensor dist = model.distribution(b, features(ex.pano)->to_tensor(), ex.tokens);
    out.push_back({predict_location(dist, grid.scale), ex.target, ex.sentence_id});
  }
  return out;
}

std::vector<metrics::SdrEvalRecord> evaluate_baseline(Baseline kind, std::span<const SdrExample> train,
                                                      std::span<const SdrExample> examples,
                                                      const GridSpec& grid, Rng& rng) {
  std::vector<Point> targets;
  for (const auto& ex : train) targets.push_back(ex.target);
  std::vector<metrics::SdrEvalRecord> out;
  for (const auto& ex : examples) {
    out.push_back({nonlearning_predict(kind, grid.image_width(), grid.image_height(), targets, rng),
                   ex.target, ex.sentence_id});
  }
  return out;
}

TrainResult train_sdr(const SdrModel& model, ParamStore params, std::span<const SdrExample> train,
                      std::span<const SdrExample> dev, const FeatureLookup& features,
                      const GridSpec& grid, const TrainConfig& config, Rng& rng,
                      const std::function<void(const EpochStats&)>& on_epoch) {
  std::vector<SdrExample> train_set(train.begin(), train.end());
  std::vector<SdrExample> dev_set(dev.begin(), dev.end());
  if (dev_set.empty()) {
    std::shuffle(train_set.begin(), train_set.end(), rng);
    const auto held = static_cast<std::size_t>(
        std::ceil(config.validation_fraction * static_cast<double>(train_set.size())));
    if (held == 0 || held >= train_set.size()) {
      throw PreconditionError("train_sdr: cannot hold out a validation set from " +
                              std::to_string(train_set.size()) + " examples");
    }
    dev_set.assign(train_set.end() - static_cast<std::ptrdiff_t>(held), train_set.end());
    train_set.resize(train_set.size() - held);
  }
  if (train_set.empty()) throw PreconditionError("train_sdr: empty training set");

  std::vector<Tensor> targets;
  targets.reserve(train_set.size());
  for (const auto& ex : train_set) targets.push_back(gaussian_target(ex.target, grid, config.sigma));

  const tensor::AdamConfig adam{config.lr > 0.0 ? config.lr : default_learning_rate(model.config().kind),
                                config.beta1, config.beta2, config.eps};
  const double radius = metrics::grid_radius(config.early_stop_radius, grid.scale);

  TrainResult result{params, {}, 0};
  EarlyStopper stopper(config.patience);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  Bindings b = params.bind();

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t i : order) {
      const SdrExample& ex = train_set[i];
      params.pull(b);
      Tensor logits = model.logits(b, features(ex.pano)->to_tensor(), ex.tokens,
                                   {config.embedding_dropout, &rng});
      Tensor loss = tensor::kl_divergence_logits(targets[i], logits);
      if (!std::isfinite(loss.item())) {
        throw NumericError("train_sdr: non-finite loss at epoch " + std::to_string(epoch) +
                           " on sentence '" + ex.sentence_id + "' pano '" + ex.pano + "'");
      }
      total += loss.item();
      loss.backward();
      params.adam_step(b, adam);
    }

    auto records = metrics::to_grid(evaluate_sdr(model, params, dev_set, features, grid), grid.scale);
    EpochStats stats{epoch, total / static_cast<double>(train_set.size()),
                     metrics::sdr_accuracy(records, radius), false};
    stats.improved = stopper.update(stats.dev_accuracy);
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

}  // namespace streetnav::sdr
