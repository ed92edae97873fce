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
#include <optional>

#include "streetnav/metrics/metrics.hpp"
#include "streetnav/nav/policy.hpp"
#include "streetnav/sdr/models.hpp"
#include "streetnav/sdr/targets.hpp"
#include "streetnav/sdr/train.hpp"
#include "streetnav/tensor/param_store.hpp"

namespace streetnav::nav {

inline constexpr double kFullTaskRadius = 80.0;  // image pixels

struct FullTaskRecord {
  env::Execution execution;
  // Set only when the agent stopped at the panorama holding the target.
  std::optional<metrics::Point> predicted;
  metrics::Point gold;
  bool success = false;
};

// Navigates with `policy`; if the final panorama is the one described by
// `target`, predicts the target location there with the SDR model. Success
// requires the right panorama and a prediction within `radius` image pixels,
// measured at grid resolution like the SDR metrics.
FullTaskRecord full_task(Policy& policy, const Episode& episode, const sdr::SdrModel& sdr_model,
                         const tensor::ParamStore& sdr_params, const sdr::SdrExample& target, const sdr::GridSpec& grid,
                         std::size_t horizon, Rng& rng, double radius = kFullTaskRadius);

double full_task_accuracy(std::span<const FullTaskRecord> records);

}  // namespace streetnav::nav
