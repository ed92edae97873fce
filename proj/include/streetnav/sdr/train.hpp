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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streetnav/sdr/feature_map.hpp"
#include "streetnav/sdr/models.hpp"
#include "streetnav/sdr/targets.hpp"

namespace streetnav::sdr {

struct SdrExample {
  std::string sentence_id;
  std::vector<std::size_t> tokens;
  std::string pano;
  Point target;  // image pixels
  std::string split;
  std::optional<std::string> nav_id;  // navigation example ending at this panorama

  bool operator==(const SdrExample&) const = default;
};

struct TrainConfig {
  double lr = 0.0;  // 0 selects the per-model default
  std::size_t max_epochs = 30;
  std::size_t patience = 4;
  double sigma = 3.0;  // Gaussian target width, grid cells
  double embedding_dropout = 0.5;
  // Dev accuracy radius (image pixels) used for early stopping; evaluated
  // at grid resolution like the reported metrics.
  double early_stop_radius = 80.0;
  double validation_fraction = 0.07;  // used only when no dev set is given
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

double default_learning_rate(ModelKind kind);

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_accuracy = 0.0;
  bool improved = false;
};

struct TrainResult {
  ParamStore best;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
};

// Adam on KL(gaussian target || predicted); returns the parameters of the
// best dev epoch. If `dev` is empty a validation_fraction slice of `train`
// is held out. Throws NumericError on a non-finite loss.
TrainResult train_sdr(const SdrModel& model, ParamStore params, std::span<const SdrExample> train,
                      std::span<const SdrExample> dev, const FeatureLookup& features,
                      const GridSpec& grid, const TrainConfig& config, Rng& rng,
                      const std::function<void(const EpochStats&)>& on_epoch = {});

// Predicted image location for every example.
std::vector<metrics::SdrEvalRecord> evaluate_sdr(const SdrModel& model, const ParamStore& params,
                                                 std::span<const SdrExample> examples,
                                                 const FeatureLookup& features, const GridSpec& grid);

std::vector<metrics::SdrEvalRecord> evaluate_baseline(Baseline kind, std::span<const SdrExample> train,
                                                      std::span<const SdrExample> examples,
                                                      const GridSpec& grid, Rng& rng);

}  // namespace streetnav::sdr
