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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streetnav/tensor/gradcheck.hpp"

namespace streetnav::harness {

inline constexpr double kGradCheckTolerance = 1e-4;
// Minimum distance of every ReLU input from zero in a model instance, and
// how many random instances are tried to find one.
inline constexpr double kKinkMargin = 1e-4;
inline constexpr std::size_t kMaxDraws = 50;

struct GradCheckEntry {
  std::string name;
  tensor::GradCheckReport report;
  std::size_t draws = 1;  // instances drawn (model losses only)
  std::optional<double> kink_margin;  // smallest |ReLU input|, model losses only
  bool passed() const { return report.max_error < kGradCheckTolerance; }
};

// Finite-difference checks (eps 1e-5, float64) of the primitives and of the
// training loss of every model at toy scale:
// conv2d, deconv2d, lstm_step, softmax_kl, and the lingunet, unet, concat,
// concatconv, text2conv, rconcat and ga losses.
std::vector<GradCheckEntry> run_gradcheck_suite(std::uint64_t seed);

}  // namespace streetnav::harness
