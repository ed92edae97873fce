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
#include <map>
#include <string>
#include <vector>

#include "streetnav/env/graph.hpp"
#include "streetnav/route/route.hpp"
#include "streetnav/sdr/feature_map.hpp"
#include "streetnav/sdr/targets.hpp"
#include "streetnav/sdr/train.hpp"
#include "streetnav/text/vocab.hpp"

namespace streetnav::route {

struct WorldConfig {
  std::uint64_t seed = 7;
  // Street grid with random diagonal shortcuts.
  std::size_t grid_rows = 20;
  std::size_t grid_cols = 20;
  double shortcut_prob = 0.15;
  double heading_jitter = 5.0;  // degrees, uniform +-
  // Per-panorama feature maps: one channel per marker class plus noise.
  std::size_t feature_height = 16;
  std::size_t feature_width = 32;
  std::size_t marker_classes = 2;
  std::size_t noise_channels = 2;
  std::size_t marker_gap = 3;  // columns between the two markers of a pair
  double image_scale = 8.0;
  std::size_t vocab_size = 20;
  // SDR examples are (sentence, panorama) pairs.
  std::size_t sdr_train = 500;
  std::size_t sdr_dev = 100;
  std::size_t max_maps_per_sentence = 3;
  // Navigation examples; each test example also gets one linked SDR example
  // at its goal for the full task.
  std::size_t nav_train = 200;
  std::size_t nav_dev = 50;
  std::size_t nav_test = 50;
  std::size_t route_min = 4;
  std::size_t route_max = 8;

  bool operator==(const WorldConfig&) const = default;
};

struct World {
  WorldConfig config;
  env::PanoGraph graph;
  std::map<std::string, sdr::FeatureMap> features;
  text::Vocab vocab;
  std::vector<NavExample> nav;
  std::vector<sdr::SdrExample> sdr;

  sdr::GridSpec grid() const { return {config.feature_height, config.feature_width, config.image_scale}; }
};

// Deterministic in config (including seed). Throws PreconditionError when
// the configuration cannot be satisfied.
World generate_world(const WorldConfig& config);

// Template words the generator needs for `marker_classes` classes.
std::vector<std::string> template_words(std::size_t marker_classes);
std::string class_word(std::size_t marker_class);

// Instruction tokens describing an action sequence ("turn left one then go
// forward three then stop").
std::vector<std::string> describe_actions(const std::vector<env::Action>& actions);

}  // namespace streetnav::route
