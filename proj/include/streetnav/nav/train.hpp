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
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "streetnav/metrics/metrics.hpp"
#include "streetnav/nav/models.hpp"

namespace streetnav::nav {

struct TrainConfig {
  double lr = 0.00025;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::size_t horizon_test = kTestHorizon;  // dev rollouts
  std::size_t crop_width = 100;
  // More than one worker trains Hogwild-style: each worker takes a disjoint
  // slice of the shuffled training set and updates the shared parameters
  // without locks. One worker is deterministic for a fixed seed.
  std::size_t workers = 1;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_nll = 0.0;  // mean per example
  double dev_spd = 0.0;
  double dev_tc = 0.0;
  bool improved = false;
};

struct TrainResult {
  ParamStore best;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
};

// Greedy (or sampled) rollouts of `policy` over `examples`, paired with the
// demonstrations as references.
std::vector<metrics::NavEvalRecord> evaluate_nav(Policy& policy, const env::PanoGraph& graph,
                                                 const sdr::FeatureLookup& features,
                                                 std::span<const route::NavExample> examples, std::size_t horizon,
                                                 DecodeMode mode, Rng& rng);

// Teacher-forced maximum likelihood on the demonstrations with Adam; early
// stopping on dev SPD (lower is better). Returns the best dev parameters.
// Throws NumericError on a non-finite loss.
TrainResult train_nav(const NavModel& model, ParamStore params, std::span<const route::NavExample> train,
                      std::span<const route::NavExample> dev, const env::PanoGraph& graph,
                      const sdr::FeatureLookup& features, const TrainConfig& config, Rng& rng,
                      const std::function<void(const EpochStats&)>& on_epoch = {});

}  // namespace streetnav::nav
