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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace streetnav::env {

// Dense index of a panorama inside one PanoGraph. Opaque string ids are only
// used at the I/O boundary.
struct NodeIndex {
  std::uint32_t value = 0;
  auto operator<=>(const NodeIndex&) const = default;
};

struct HalfEdge {
  double heading = 0.0;  // degrees in [0, 360) at the source panorama
  NodeIndex target;
};

enum class Action : std::uint8_t { kForward = 0, kLeft = 1, kRight = 2, kStop = 3 };

inline constexpr std::array<Action, 4> kAllActions = {
    Action::kForward, Action::kLeft, Action::kRight, Action::kStop};
inline constexpr std::size_t kNumActions = kAllActions.size();

std::string_view to_string(Action a);
// Accepts "FORWARD"/"forward" etc. Throws PreconditionError otherwise.
Action parse_action(std::string_view name);

struct State {
  NodeIndex pano;
  double heading = 0.0;
  bool operator==(const State&) const = default;
};

struct Step {
  State state;
  Action action = Action::kStop;
  bool operator==(const Step&) const = default;
};

class PanoGraph;

// A state-action trajectory. Valid executions end with exactly one STOP and
// chain through the transition function.
struct Execution {
  std::vector<Step> steps;

  NodeIndex final_pano() const;
  // Visited panoramas with consecutive repeats (turning in place) collapsed.
  std::vector<NodeIndex> panoramas() const;
  std::vector<Action> actions() const;
};

// Undirected panorama graph; each endpoint of an edge carries its own heading.
// Immutable once built, so concurrent readers need no synchronization.
class PanoGraph {
 public:
  class Builder {
   public:
    NodeIndex add_node(std::string id);
    void add_half_edge(std::string_view source, double heading, std::string_view target);
    // Validates every invariant; throws PreconditionError naming the violation.
    PanoGraph build() &&;

   private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::vector<std::vector<HalfEdge>> edges_;
  };

  PanoGraph() = default;

  std::size_t num_nodes() const { return ids_.size(); }
  std::size_t num_half_edges() const;
  std::size_t num_edges() const { return num_half_edges() / 2; }

  const std::string& id(NodeIndex n) const;
  NodeIndex index(std::string_view id) const;  // throws LookupError
  std::optional<NodeIndex> find(std::string_view id) const;
  bool contains(NodeIndex n) const { return n.value < ids_.size(); }

  // Half-edges of a node sorted by increasing heading.
  std::span<const HalfEdge> edges(NodeIndex n) const;
  // Position in edges(n) of the half-edge at `heading` (1e-9 tolerance).
  std::optional<std::size_t> edge_slot(NodeIndex n, double heading) const;
  bool adjacent(NodeIndex a, NodeIndex b) const;
  bool is_valid(const State& s) const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::vector<HalfEdge>> edges_;
};

// Signed difference b - a wrapped into (-180, 180].
double angular_difference(double a, double b);

// Deterministic transition. STOP returns the state unchanged.
// Throws PreconditionError if `s` is not a valid state of `graph`.
State transition(const PanoGraph& graph, const State& s, Action a);

// Breadth-first hop count; nullopt when b is unreachable from a.
std::optional<std::size_t> shortest_path_hops(const PanoGraph& graph, NodeIndex a, NodeIndex b);
// One shortest path a..b inclusive (neighbors expanded in heading order), or
// nullopt if unreachable.
std::optional<std::vector<NodeIndex>> shortest_path(const PanoGraph& graph, NodeIndex a, NodeIndex b);

// Throws PreconditionError describing the first violated Execution invariant.
void validate_execution(const PanoGraph& graph, const Execution& e);

}  // namespace streetnav::env

template <>
struct std::hash<streetnav::env::NodeIndex> {
  std::size_t operator()(const streetnav::env::NodeIndex& n) const noexcept {
    return std::hash<std::uint32_t>{}(n.value);
  }
};
