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
#include "streetnav/env/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "streetnav/common/error.hpp"

namespace streetnav::env {

namespace {

constexpr double kHeadingTolerance = 1e-9;

std::string state_str(const PanoGraph& g, const State& s) {
  std::ostringstream os;
  os << "(" << (g.contains(s.pano) ? g.id(s.pano) : "#" + std::to_string(s.pano.value)) << ", "
     << s.heading << ")";
  return os.str();
}

}  // namespace

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kForward: return "FORWARD";
    case Action::kLeft: return "LEFT";
    case Action::kRight: return "RIGHT";
    case Action::kStop: return "STOP";
  }
  return "?";
}

Action parse_action(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Action a : kAllActions) {
    if (to_string(a) == upper) return a;
  }
  throw PreconditionError("unknown action '" + std::string(name) + "'");
}

NodeIndex Execution::final_pano() const {
  if (steps.empty()) throw PreconditionError("empty execution has no final panorama");
  return steps.back().state.pano;
}

std::vector<NodeIndex> Execution::panoramas() const {
  std::vector<NodeIndex> out;
  for (const Step& s : steps) {
    if (out.empty() || out.back() != s.state.pano) out.push_back(s.state.pano);
  }
  return out;
}

std::vector<Action> Execution::actions() const {
  std::vector<Action> out;
  out.reserve(steps.size());
  for (const Step& s : steps) out.push_back(s.action);
  return out;
}

NodeIndex PanoGraph::Builder::add_node(std::string id) {
  if (id.empty()) throw PreconditionError("empty panorama id");
  if (index_.contains(id)) throw PreconditionError("duplicate panorama id '" + id + "'");
  NodeIndex n{static_cast<std::uint32_t>(ids_.size())};
  index_.emplace(id, n);
  ids_.push_back(std::move(id));
  edges_.emplace_back();
  return n;
}

void PanoGraph::Builder::add_half_edge(std::string_view source, double heading,
                                       std::string_view target) {
  auto s = index_.find(std::string(source));
  auto t = index_.find(std::string(target));
  if (s == index_.end()) throw PreconditionError("unknown panorama '" + std::string(source) + "'");
  if (t == index_.end()) throw PreconditionError("unknown panorama '" + std::string(target) + "'");
  if (!std::isfinite(heading) || heading < 0.0 || heading >= 360.0) {
    throw PreconditionError("heading out of [0,360) at '" + std::string(source) + "'");
  }
  edges_[s->second.value].push_back(HalfEdge{heading, t->second});
}

PanoGraph PanoGraph::Builder::build() && {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    auto& list = edges_[i];
    if (list.empty()) throw PreconditionError("panorama '" + ids_[i] + "' has no edges");
    std::sort(list.begin(), list.end(),
              [](const HalfEdge& a, const HalfEdge& b) { return a.heading < b.heading; });
    for (std::size_t k = 1; k < list.size(); ++k) {
      if (list[k].heading == list[k - 1].heading) {
        throw PreconditionError("duplicate heading at panorama '" + ids_[i] + "'");
      }
    }
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    for (const HalfEdge& e : edges_[i]) {
      const auto& back = edges_[e.target.value];
      bool found = std::any_of(back.begin(), back.end(),
                               [&](const HalfEdge& r) { return r.target.value == i; });
      if (!found) {
        throw PreconditionError("missing reverse edge " + ids_[e.target.value] + " -> " + ids_[i]);
      }
    }
  }
  PanoGraph g;
  g.ids_ = std::move(ids_);
  g.index_ = std::move(index_);
  g.edges_ = std::move(edges_);
  return g;
}

std::size_t PanoGraph::num_half_edges() const {
  std::size_t n = 0;
  for (const auto& l : edges_) n += l.size();
  return n;
}

const std::string& PanoGraph::id(NodeIndex n) const {
  if (!contains(n)) throw LookupError("node index " + std::to_string(n.value) + " out of range");
  return ids_[n.value];
}

NodeIndex PanoGraph::index(std::string_view id) const {
  auto n = find(id);
  if (!n) throw LookupError("unknown panorama id '" + std::string(id) + "'");
  return *n;
}

std::optional<NodeIndex> PanoGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const HalfEdge> PanoGraph::edges(NodeIndex n) const {
  if (!contains(n)) throw LookupError("node index " + std::to_string(n.value) + " out of range");
  return edges_[n.value];
}

std::optional<std::size_t> PanoGraph::edge_slot(NodeIndex n, double heading) const {
  auto list = edges(n);
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (std::abs(list[k].heading - heading) <= kHeadingTolerance) return k;
  }
  return std::nullopt;
}

bool PanoGraph::adjacent(NodeIndex a, NodeIndex b) const {
  auto list = edges(a);
  return std::any_of(list.begin(), list.end(), [&](const HalfEdge& e) { return e.target == b; });
}

bool PanoGraph::is_valid(const State& s) const {
  return contains(s.pano) && edge_slot(s.pano, s.heading).has_value();
}

double angular_difference(double a, double b) {
  double d = std::fmod(b - a, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

State transition(const PanoGraph& graph, const State& s, Action a) {
  if (!graph.contains(s.pano)) {
    throw PreconditionError("invalid state " + state_str(graph, s) + ": unknown panorama");
  }
  auto slot = graph.edge_slot(s.pano, s.heading);
  if (!slot) {
    throw PreconditionError("invalid state " + state_str(graph, s) + ": no edge at heading");
  }
  auto list = graph.edges(s.pano);
  const std::size_t k = list.size();
  switch (a) {
    case Action::kStop:
      return s;
    case Action::kLeft:
      return State{s.pano, list[(*slot + k - 1) % k].heading};
    case Action::kRight:
      return State{s.pano, list[(*slot + 1) % k].heading};
    case Action::kForward: {
      const HalfEdge& e = list[*slot];
      auto next = graph.edges(e.target);
      double best = next.front().heading;
      double best_dist = std::numeric_limits<double>::infinity();
      // edges are sorted, so the first of two equidistant headings is the smaller
      for (const HalfEdge& n : next) {
        double d = std::abs(angular_difference(s.heading, n.heading));
        if (d < best_dist) {
          best_dist = d;
          best = n.heading;
        }
      }
      return State{e.target, best};
    }
  }
  return s;
}

namespace {

// BFS parents from a; stops early once b is reached.
std::vector<std::int64_t> bfs_parents(const PanoGraph& graph, NodeIndex a, NodeIndex b) {
  std::vector<std::int64_t> parent(graph.num_nodes(), -1);
  std::deque<NodeIndex> queue{a};
  parent[a.value] = a.value;
  while (!queue.empty()) {
    NodeIndex cur = queue.front();
    queue.pop_front();
    if (cur == b) break;
    for (const HalfEdge& e : graph.edges(cur)) {
      if (parent[e.target.value] < 0) {
        parent[e.target.value] = cur.value;
        queue.push_back(e.target);
      }
    }
  }
  return parent;
}

}  // namespace

std::optional<std::vector<NodeIndex>> shortest_path(const PanoGraph& graph, NodeIndex a,
                                                    NodeIndex b) {
  if (!graph.contains(a) || !graph.contains(b)) throw LookupError("shortest_path: unknown node");
  auto parent = bfs_parents(graph, a, b);
  if (parent[b.value] < 0) return std::nullopt;
  std::vector<NodeIndex> path{b};
  while (path.back() != a) {
    path.push_back(NodeIndex{static_cast<std::uint32_t>(parent[path.back().value])});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<std::size_t> shortest_path_hops(const PanoGraph& graph, NodeIndex a, NodeIndex b) {
  auto p = shortest_path(graph, a, b);
  if (!p) return std::nullopt;
  return p->size() - 1;
}

void validate_execution(const PanoGraph& graph, const Execution& e) {
  if (e.steps.empty()) throw PreconditionError("execution is empty");
  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    const Step& st = e.steps[i];
    if (!graph.is_valid(st.state)) {
      throw PreconditionError("execution step " + std::to_string(i) + " has invalid state " +
                              state_str(graph, st.state));
    }
    bool last = i + 1 == e.steps.size();
    if (last != (st.action == Action::kStop)) {
      throw PreconditionError("execution must end with its only STOP (step " + std::to_string(i) +
                              ")");
    }
    if (!last && transition(graph, st.state, st.action) != e.steps[i + 1].state) {
      throw PreconditionError("execution step " + std::to_string(i) +
                              " does not follow the transition function");
    }
  }
}

}  // namespace streetnav::env
