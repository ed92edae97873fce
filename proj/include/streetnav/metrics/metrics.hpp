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

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "streetnav/env/graph.hpp"

namespace streetnav::metrics {

// Unit-cost insert/delete/substitute edit distance, two-row DP.
template <typename T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

template <typename T>
std::size_t levenshtein(const std::vector<T>& a, const std::vector<T>& b) {
  return levenshtein(std::span<const T>(a), std::span<const T>(b));
}

// ---- navigation -----------------------------------------------------------

struct NavEvalRecord {
  env::Execution predicted;
  env::Execution reference;
  env::NodeIndex goal;
};

// True iff `final_pano` is the goal or one of its graph neighbors.
bool task_completion(const env::PanoGraph& graph, env::NodeIndex final_pano, env::NodeIndex goal);

// Edit-distance similarity of the two executions' panorama sequences,
// 1 - lev / max(|ref|, |pred|). Consecutive repeats are collapsed first.
double edit_similarity(const env::Execution& predicted, const env::Execution& reference);

double tc_rate(std::span<const NavEvalRecord> records, const env::PanoGraph& graph);
// Mean hop distance from final predicted panorama to goal. Throws NumericError
// on an unreachable pair.
double spd(std::span<const NavEvalRecord> records, const env::PanoGraph& graph);
double sed(std::span<const NavEvalRecord> records, const env::PanoGraph& graph);

struct NavSummary {
  double tc = 0.0;   // fraction in [0,1]
  double spd = 0.0;  // hops
  double sed = 0.0;
};
NavSummary summarize_nav(std::span<const NavEvalRecord> records, const env::PanoGraph& graph);

// ---- spatial description resolution ---------------------------------------

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

double euclidean(const Point& a, const Point& b);

struct SdrEvalRecord {
  Point predicted;  // image pixels
  Point gold;       // image pixels
  std::string sentence_id;
};

// Distance exactly equal to the radius counts as correct.
bool sdr_correct(const SdrEvalRecord& r, double radius);
double sdr_accuracy(std::span<const SdrEvalRecord> records, double radius);
// Fraction of distinct sentence ids whose every record is correct.
double sdr_consistency(std::span<const SdrEvalRecord> records, double radius);
double sdr_mean_distance(std::span<const SdrEvalRecord> records);

// Evaluation at feature-grid resolution: both coordinates are mapped to the
// grid cell containing them (floor(c / scale)) and radii are divided by scale.
double grid_radius(double image_radius, double scale);
std::vector<SdrEvalRecord> to_grid(std::span<const SdrEvalRecord> records, double scale);

struct SdrSummary {
  double accuracy_40 = 0, accuracy_80 = 0, accuracy_120 = 0;
  double consistency_40 = 0, consistency_80 = 0, consistency_120 = 0;
  double mean_distance = 0;
};
// The three standard slack radii in image pixels, evaluated at grid scale.
SdrSummary summarize_sdr(std::span<const SdrEvalRecord> records, double scale);

}  // namespace streetnav::metrics
