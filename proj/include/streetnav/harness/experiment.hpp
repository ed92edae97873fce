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

#include <iosfwd>
#include <span>
#include <string_view>

#include "streetnav/harness/config.hpp"
#include "streetnav/harness/report.hpp"
#include "streetnav/nav/models.hpp"
#include "streetnav/nav/train.hpp"
#include "streetnav/route/world.hpp"
#include "streetnav/sdr/models.hpp"
#include "streetnav/sdr/train.hpp"

namespace streetnav::harness {

// Commands understood by run_experiment.
std::span<const std::string_view> commands();

// Runs one command end to end and returns its report. Training commands
// write their checkpoint when the corresponding "*.checkpoint" key is set.
// Progress lines go to `log` when given. Errors propagate as exceptions.
Report run_experiment(std::string_view command, const Config& config, std::ostream* log = nullptr);

// Typed views of a Config.
route::WorldConfig world_config(const Config& c);
sdr::ModelConfig sdr_model_config(const Config& c, std::size_t vocab_size);
sdr::TrainConfig sdr_train_config(const Config& c);
nav::ModelConfig nav_model_config(const Config& c, std::size_t vocab_size, std::size_t feature_height);
nav::TrainConfig nav_train_config(const Config& c);
// "32x8/4,64x4/4" -> {{32, 8, 4}, {64, 4, 4}}; empty -> {}.
std::vector<nav::ConvLayer> parse_convs(std::string_view spec);

}  // namespace streetnav::harness
