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
#include "streetnav/nav/policy.hpp"

namespace streetnav::nav {

env::Execution rollout(Policy& policy, const Episode& episode, std::size_t horizon, DecodeMode mode, Rng& rng) {
  policy.begin(episode);
  env::State s = episode.example.start();
  env::Execution e;
  for (std::size_t t = 0;; ++t) {
    const Action a = t >= horizon ? Action::kStop : policy.act(t, s, mode, rng);
    e.steps.push_back({s, a});
    if (a == Action::kStop) break;
    s = env::transition(episode.graph, s, a);
  }
  return e;
}

}  // namespace streetnav::nav
