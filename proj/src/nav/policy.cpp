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

#include <string>

#include "streetnav/common/error.hpp"

namespace streetnav::nav {

namespace {

class FixedPolicy final : public Policy {
 public:
  explicit FixedPolicy(Action a) : action_(a) {}
  void begin(const Episode&) override {}
  Action act(std::size_t, const env::State&, DecodeMode, Rng&) override { return action_; }

 private:
  Action action_;
};

class RandomPolicy final : public Policy {
 public:
  void begin(const Episode&) override {}
  Action act(std::size_t, const env::State&, DecodeMode, Rng& rng) override {
    static constexpr Action kMoves[] = {Action::kForward, Action::kLeft, Action::kRight};
    return kMoves[std::uniform_int_distribution<int>(0, 2)(rng)];
  }
};

}  // namespace

BaselineKind parse_baseline(std::string_view name) {
  if (name == "stop") return BaselineKind::kStop;
  if (name == "random") return BaselineKind::kRandom;
  if (name == "frequent") return BaselineKind::kFrequent;
  throw PreconditionError("unknown navigation baseline '" + std::string(name) + "'");
}

std::unique_ptr<Policy> make_baseline(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kStop: return std::make_unique<FixedPolicy>(Action::kStop);
    case BaselineKind::kRandom: return std::make_unique<RandomPolicy>();
    case BaselineKind::kFrequent: return std::make_unique<FixedPolicy>(Action::kForward);
  }
  throw PreconditionError("bad baseline kind");
}

Action argmax_action(const ActionProbs& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return env::kAllActions[best];
}

Action sample_action(const ActionProbs& p, Rng& rng) {
  std::discrete_distribution<std::size_t> d(p.begin(), p.end());
  return env::kAllActions[d(rng)];
}

}  // namespace streetnav::nav
