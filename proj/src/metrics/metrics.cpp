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
#include "streetnav/metrics/metrics.hpp"

#include <cmath>
#include <map>

#include "streetnav/common/error.hpp"

namespace streetnav::metrics {

bool task_completion(const env::PanoGraph& graph, env::NodeIndex final_pano, env::NodeIndex goal) {
  if (!graph.contains(final_pano) || !graph.contains(goal)) {
    throw LookupError("task_completion: unknown panorama");
  }
  return final_pano == goal || graph.adjacent(final_pano, goal);
}

double edit_similarity(const env::Execution& predicted, const env::Execution& reference) {
  auto p = predicted.panoramas();
  auto r = reference.panoramas();
  std::size_t denom = std::max(p.size(), r.size());
  if (denom == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(r, p)) / static_cast<double>(denom);
}

double tc_rate(std::span<const NavEvalRecord> records, const env::PanoGraph& graph) {
  if (records.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& r : records) ok += task_completion(graph, r.predicted.final_pano(), r.goal);
  return static_cast<double>(ok) / static_cast<double>(records.size());
}

double spd(std::span<const NavEvalRecord> records, const env::PanoGraph& graph) {
  if (records.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : records) {
    auto hops = env::shortest_path_hops(graph, r.predicted.final_pano(), r.goal);
    if (!hops) throw NumericError("spd: goal unreachable from final panorama");
    total += static_cast<double>(*hops);
  }
  return total / static_cast<double>(records.size());
}

double sed(std::span<const NavEvalRecord> records, const env::PanoGraph& graph) {
  if (records.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : records) {
    if (task_completion(graph, r.predicted.final_pano(), r.goal)) {
      total += edit_similarity(r.predicted, r.reference);
    }
  }
  return total / static_cast<double>(records.size());
}

NavSummary summarize_nav(std::span<const NavEvalRecord> records, const env::PanoGraph& graph) {
  return NavSummary{tc_rate(records, graph), spd(records, graph), sed(records, graph)};
}

double euclidean(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool sdr_correct(const SdrEvalRecord& r, double radius) {
  return euclidean(r.predicted, r.gold) <= radius;
}

double sdr_accuracy(std::span<const SdrEvalRecord> records, double radius) {
  if (radius <= 0.0) throw PreconditionError("sdr_accuracy: radius must be positive");
  if (records.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& r : records) ok += sdr_correct(r, radius);
  return static_cast<double>(ok) / static_cast<double>(records.size());
}

double sdr_consistency(std::span<const SdrEvalRecord> records, double radius) {
  if (radius <= 0.0) throw PreconditionError("sdr_consistency: radius must be positive");
  std::map<std::string, bool> all_correct;
  for (const auto& r : records) {
    auto [it, inserted] = all_correct.emplace(r.sentence_id, true);
    it->second = it->second && sdr_correct(r, radius);
  }
  if (all_correct.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& [id, good] : all_correct) ok += good;
  return static_cast<double>(ok) / static_cast<double>(all_correct.size());
}

double sdr_mean_distance(std::span<const SdrEvalRecord> records) {
  if (records.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : records) total += euclidean(r.predicted, r.gold);
  return total / static_cast<double>(records.size());
}

double grid_radius(double image_radius, double scale) {
  if (scale <= 0.0) throw PreconditionError("grid_radius: scale must be positive");
  return image_radius / scale;
}

std::vector<SdrEvalRecord> to_grid(std::span<const SdrEvalRecord> records, double scale) {
  if (scale <= 0.0) throw PreconditionError("to_grid: scale must be positive");
  auto cell = [scale](const Point& p) {
    return Point{std::floor(p.x / scale), std::floor(p.y / scale)};
  };
  std::vector<SdrEvalRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({cell(r.predicted), cell(r.gold), r.sentence_id});
  return out;
}

SdrSummary summarize_sdr(std::span<const SdrEvalRecord> records, double scale) {
  auto grid = to_grid(records, scale);
  SdrSummary s;
  s.accuracy_40 = sdr_accuracy(grid, grid_radius(40, scale));
  s.accuracy_80 = sdr_accuracy(grid, grid_radius(80, scale));
  s.accuracy_120 = sdr_accuracy(grid, grid_radius(120, scale));
  s.consistency_40 = sdr_consistency(grid, grid_radius(40, scale));
  s.consistency_80 = sdr_consistency(grid, grid_radius(80, scale));
  s.consistency_120 = sdr_consistency(grid, grid_radius(120, scale));
  s.mean_distance = sdr_mean_distance(records);
  return s;
}

}  // namespace streetnav::metrics
