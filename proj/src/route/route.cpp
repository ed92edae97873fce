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
#include "streetnav/route/route.hpp"

#include "streetnav/common/error.hpp"

namespace streetnav::route {

void validate_route(const PanoGraph& graph, const Route& route) {
  if (route.size() < 2) throw PreconditionError("route needs at least 2 panoramas");
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (!graph.contains(route[i])) {
      throw PreconditionError("route position " + std::to_string(i) + " is not a panorama of the graph");
    }
    if (i > 0 && !graph.adjacent(route[i - 1], route[i])) {
      throw PreconditionError("route positions " + std::to_string(i - 1) + " and " + std::to_string(i) + " (" +
                              graph.id(route[i - 1]) + ", " + graph.id(route[i]) + ") are not adjacent");
    }
  }
}

std::vector<Route> segment_path(const std::vector<NodeIndex>& path, std::size_t min_len,
                                std::size_t max_len, Rng& rng) {
  if (min_len < 2 || min_len > max_len) {
    throw PreconditionError("segment lengths need 2 <= min_len <= max_len");
  }
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::vector<Route> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const std::size_t n = std::min(len(rng), path.size() - pos);
    if (n >= 2) out.emplace_back(path.begin() + static_cast<std::ptrdiff_t>(pos),
                                 path.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
  }
  return out;
}

std::vector<Route> sample_route(const PanoGraph& graph, std::uint64_t seed, std::size_t min_len,
                                std::size_t max_len, std::size_t max_retries) {
  if (graph.num_nodes() < 2) throw PreconditionError("sample_route: graph needs 2 panoramas");
  Rng rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(graph.num_nodes() - 1));
  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    const NodeIndex a{pick(rng)}, b{pick(rng)};
    if (a == b) continue;
    if (auto path = env::shortest_path(graph, a, b)) return segment_path(*path, min_len, max_len, rng);
  }
  throw PreconditionError("sample_route: no reachable endpoint pair after " + std::to_string(max_retries) +
                          " retries");
}

RepairResult repair_gaps(const Route& route, const PanoGraph& graph, std::size_t max_gaps) {
  RepairResult r;
  if (route.empty()) {
    r.reason = "empty route";
    return r;
  }
  for (NodeIndex n : route) {
    if (!graph.contains(n)) {
      r.reason = "route references a panorama outside the graph";
      return r;
    }
  }
  for (std::size_t i = 1; i < route.size(); ++i) r.gaps += !graph.adjacent(route[i - 1], route[i]);
  if (r.gaps >= max_gaps) {
    r.reason = std::to_string(r.gaps) + " gaps (limit " + std::to_string(max_gaps) + ")";
    return r;
  }
  Route out{route.front()};
  for (std::size_t i = 1; i < route.size(); ++i) {
    const NodeIndex a = out.back(), b = route[i];
    if (a == b) continue;
    if (graph.adjacent(a, b)) {
      out.push_back(b);
      continue;
    }
    auto bridge = env::shortest_path(graph, a, b);
    if (!bridge) {
      r.reason = "gap " + graph.id(a) + " -> " + graph.id(b) + " is not bridgeable";
      return r;
    }
    out.insert(out.end(), bridge->begin() + 1, bridge->end());
  }
  if (out.size() < 2) {
    r.reason = "route collapses to a single panorama";
    return r;
  }
  r.route = std::move(out);
  return r;
}

env::Execution demonstration_from_route(const PanoGraph& graph, const Route& route, double start_heading) {
  validate_route(graph, route);
  env::State s{route.front(), start_heading};
  if (!graph.is_valid(s)) {
    throw PreconditionError("start heading " + std::to_string(start_heading) + " is not an edge of " +
                            graph.id(route.front()));
  }
  env::Execution e;
  auto act = [&](env::Action a) {
    e.steps.push_back({s, a});
    s = env::transition(graph, s, a);
  };
  for (std::size_t i = 1; i < route.size(); ++i) {
    const auto edges = graph.edges(s.pano);
    const std::size_t deg = edges.size(), cur = *graph.edge_slot(s.pano, s.heading);
    std::size_t best_turns = deg;
    env::Action best_dir = env::Action::kRight;
    for (std::size_t slot = 0; slot < deg; ++slot) {
      if (edges[slot].target != route[i]) continue;
      const std::size_t right = (slot + deg - cur) % deg, left = (cur + deg - slot) % deg;
      const std::size_t turns = std::min(left, right);
      if (turns < best_turns) {
        best_turns = turns;
        best_dir = left < right ? env::Action::kLeft : env::Action::kRight;
      }
    }
    for (std::size_t t = 0; t < best_turns; ++t) act(best_dir);
    act(env::Action::kForward);
    if (s.pano != route[i]) throw PreconditionError("route is not realizable at position " + std::to_string(i));
  }
  e.steps.push_back({s, env::Action::kStop});
  return e;
}

}  // namespace streetnav::route
