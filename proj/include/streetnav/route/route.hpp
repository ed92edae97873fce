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

#include "streetnav/common/rng.hpp"
#include "streetnav/env/graph.hpp"

namespace streetnav::route {

using env::NodeIndex;
using env::PanoGraph;

// Panorama sequence; consecutive entries are adjacent and size() >= 2.
using Route = std::vector<NodeIndex>;

// Throws PreconditionError naming the first violation.
void validate_route(const PanoGraph& graph, const Route& route);

// Splits `path` into consecutive disjoint segments whose lengths are drawn
// uniformly from [min_len, max_len]; the shorter final suffix is kept. A
// suffix of a single panorama cannot form a route and is dropped.
std::vector<Route> segment_path(const std::vector<NodeIndex>& path, std::size_t min_len,
                                std::size_t max_len, Rng& rng);

// Samples two panoramas, takes a shortest path between them and segments it.
// Unreachable or identical endpoint pairs are resampled up to `max_retries`
// times before throwing PreconditionError.
std::vector<Route> sample_route(const PanoGraph& graph, std::uint64_t seed, std::size_t min_len = 35,
                                std::size_t max_len = 45, std::size_t max_retries = 100);

struct RepairResult {
  std::optional<Route> route;  // set on success
  std::size_t gaps = 0;
  std::string reason;  // set on rejection
};

// A gap is a pair of consecutive panoramas that are not adjacent (a repeated
// panorama counts as one). Routes with fewer than `max_gaps` gaps are
// bridged with shortest paths; others are rejected.
RepairResult repair_gaps(const Route& route, const PanoGraph& graph, std::size_t max_gaps = 3);

// Minimal demonstration: per hop, the fewer of left or right turns (ties
// turn right), then FORWARD; a final STOP. Replaying it visits `route`.
env::Execution demonstration_from_route(const PanoGraph& graph, const Route& route, double start_heading);

// Instruction-following example. `route` starts at start_pano.
struct NavExample {
  std::string id;
  std::vector<std::size_t> tokens;
  NodeIndex start_pano;
  double start_heading = 0.0;
  Route route;
  NodeIndex goal;
  std::string split;

  env::State start() const { return {start_pano, start_heading}; }
  bool operator==(const NavExample&) const = default;
};

}  // namespace streetnav::route
