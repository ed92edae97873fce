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

#include <array>
#include <cstddef>
#include <memory>
#include <string_view>

#include "streetnav/common/rng.hpp"
#include "streetnav/env/graph.hpp"
#include "streetnav/route/route.hpp"
#include "streetnav/sdr/feature_map.hpp"

namespace streetnav::nav {

using env::Action;
using ActionProbs = std::array<double, env::kNumActions>;  // kAllActions order

inline constexpr std::size_t kTestHorizon = 50;
inline constexpr std::size_t kTrainHorizon = 55;

enum class DecodeMode { kGreedy, kSample };

struct Episode {
  const env::PanoGraph& graph;
  const sdr::FeatureLookup& features;
  const route::NavExample& example;
};

// A navigation policy. begin() starts an episode; act() is then called once
// per step with the current state and returns the chosen action.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin(const Episode& episode) = 0;
  virtual Action act(std::size_t t, const env::State& state, DecodeMode mode, Rng& rng) = 0;
};

enum class BaselineKind { kStop, kRandom, kFrequent };
BaselineKind parse_baseline(std::string_view name);

// stop: STOP at once. random: uniform over FORWARD/LEFT/RIGHT. frequent:
// always FORWARD. Rollouts force STOP at the horizon.
std::unique_ptr<Policy> make_baseline(BaselineKind kind);

// Index of the most probable action; first in kAllActions order on ties.
Action argmax_action(const ActionProbs& p);
Action sample_action(const ActionProbs& p, Rng& rng);

// Runs `policy` from the example's start state until it stops or `horizon`
// actions have been taken, when STOP is forced. The result is a valid
// Execution with at most horizon + 1 steps.
env::Execution rollout(Policy& policy, const Episode& episode, std::size_t horizon, DecodeMode mode, Rng& rng);

}  // namespace streetnav::nav
