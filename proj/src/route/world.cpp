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
#include "streetnav/route/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "streetnav/common/error.hpp"
#include "streetnav/common/text_io.hpp"

namespace streetnav::route {

namespace {

const char* const kColors[] = {"red", "blue", "green", "yellow", "purple", "orange", "black", "white"};
const char* const kCounts[] = {"one", "two", "three", "four"};
const char* const kFillers[] = {"please", "now", "next", "just", "carefully", "quickly", "okay", "so"};
const char* const kSdrWords[] = {"the", "of", "pair", "left", "right"};
const char* const kNavWords[] = {"go", "forward", "turn", "stop", "then", "one", "two", "three", "four"};

std::string pad3(std::size_t i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

double jittered(double base, double jitter, Rng& rng) {
  std::uniform_real_distribution<double> d(-jitter, jitter);
  double h = base + d(rng);
  h = std::round(h * 10.0) / 10.0;
  h = std::fmod(h + 360.0, 360.0);
  return h >= 360.0 ? 0.0 : h;
}

env::PanoGraph build_grid(const WorldConfig& c, Rng& rng) {
  env::PanoGraph::Builder b;
  auto id = [&](std::size_t r, std::size_t col) { return "n" + pad3(r * c.grid_cols + col); };
  for (std::size_t r = 0; r < c.grid_rows; ++r)
    for (std::size_t col = 0; col < c.grid_cols; ++col) b.add_node(id(r, col));
  auto link = [&](std::size_t r1, std::size_t c1, double heading, std::size_t r2, std::size_t c2) {
    b.add_half_edge(id(r1, c1), jittered(heading, c.heading_jitter, rng), id(r2, c2));
    b.add_half_edge(id(r2, c2), jittered(std::fmod(heading + 180.0, 360.0), c.heading_jitter, rng), id(r1, c1));
  };
  std::bernoulli_distribution shortcut(c.shortcut_prob), anti(0.5);
  for (std::size_t r = 0; r < c.grid_rows; ++r) {
    for (std::size_t col = 0; col < c.grid_cols; ++col) {
      if (col + 1 < c.grid_cols) link(r, col, 90.0, r, col + 1);
      if (r + 1 < c.grid_rows) link(r, col, 180.0, r + 1, col);
      if (r + 1 < c.grid_rows && col + 1 < c.grid_cols && shortcut(rng)) {
        if (anti(rng)) {
          link(r, col + 1, 225.0, r + 1, col);
        } else {
          link(r, col, 135.0, r + 1, col + 1);
        }
      }
    }
  }
  return std::move(b).build();
}

struct Marker {
  std::size_t row, left_col;  // the pair occupies left_col and left_col + gap
};

// One marker pair per class, kept at least one empty cell apart from the
// other pairs.
std::vector<Marker> place_markers(const WorldConfig& c, Rng& rng) {
  std::uniform_int_distribution<std::size_t> row(0, c.feature_height - 1), col(0, c.feature_width - 1 - c.marker_gap);
  std::vector<Marker> out;
  std::set<std::pair<long, long>> blocked;
  for (std::size_t k = 0; k < c.marker_classes; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const Marker m{row(rng), col(rng)};
      const long r = static_cast<long>(m.row), x0 = static_cast<long>(m.left_col);
      const long x1 = x0 + static_cast<long>(c.marker_gap);
      if (blocked.count({r, x0}) || blocked.count({r, x1})) continue;
      for (long dr = -1; dr <= 1; ++dr)
        for (long dx = -1; dx <= 1; ++dx) {
          blocked.insert({r + dr, x0 + dx});
          blocked.insert({r + dr, x1 + dx});
        }
      out.push_back(m);
      placed = true;
    }
    if (!placed) throw PreconditionError("cannot place " + std::to_string(c.marker_classes) + " marker pairs");
  }
  return out;
}

sdr::FeatureMap render(const WorldConfig& c, const std::vector<Marker>& markers, Rng& rng) {
  sdr::FeatureMap f(c.marker_classes + c.noise_channels, c.feature_height, c.feature_width);
  std::uniform_real_distribution<float> faint(0.0f, 0.2f), noise(0.0f, 1.0f);
  for (std::size_t ch = 0; ch < f.channels(); ++ch)
    for (std::size_t y = 0; y < f.height(); ++y)
      for (std::size_t x = 0; x < f.width(); ++x) f.at(ch, y, x) = ch < c.marker_classes ? faint(rng) : noise(rng);
  for (std::size_t k = 0; k < markers.size(); ++k) {
    f.at(k, markers[k].row, markers[k].left_col) = 1.0f;
    f.at(k, markers[k].row, markers[k].left_col + c.marker_gap) = 1.0f;
  }
  return f;
}

void check_config(const WorldConfig& c) {
  if (c.grid_rows * c.grid_cols < 2) throw PreconditionError("world needs at least 2 panoramas");
  if (c.feature_height == 0 || c.marker_classes == 0 || c.feature_width <= c.marker_gap || c.marker_gap == 0) {
    throw PreconditionError("feature grid too small for marker pairs");
  }
  if (2 * c.marker_classes * 9 > c.feature_height * c.feature_width) {
    throw PreconditionError("more markers than the feature grid can hold");
  }
  if (c.image_scale <= 0.0) throw PreconditionError("image_scale must be positive");
  if (c.max_maps_per_sentence == 0) throw PreconditionError("max_maps_per_sentence must be positive");
  if (c.route_min < 2 || c.route_min > c.route_max) throw PreconditionError("need 2 <= route_min <= route_max");
  if (template_words(c.marker_classes).size() + 1 > c.vocab_size) {
    throw PreconditionError("vocab_size " + std::to_string(c.vocab_size) + " below the " +
                            std::to_string(template_words(c.marker_classes).size() + 1) +
                            " tokens the templates need");
  }
  if (c.sdr_train + c.sdr_dev > 2 * c.marker_classes * c.grid_rows * c.grid_cols) {
    throw PreconditionError("more SDR examples than distinct (panorama, class, side) triples");
  }
}

}  // namespace

std::string class_word(std::size_t k) {
  return k < std::size(kColors) ? kColors[k] : "class" + std::to_string(k);
}

std::vector<std::string> template_words(std::size_t marker_classes) {
  std::vector<std::string> w(std::begin(kSdrWords), std::end(kSdrWords));
  for (std::size_t k = 0; k < marker_classes; ++k) w.push_back(class_word(k));
  for (const char* n : kNavWords) w.emplace_back(n);
  return w;
}

std::vector<std::string> describe_actions(const std::vector<env::Action>& actions) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < actions.size()) {
    const env::Action a = actions[i];
    if (a == env::Action::kStop) break;
    std::size_t run = 0;
    while (i < actions.size() && actions[i] == a) ++run, ++i;
    while (run > 0) {
      const std::size_t n = std::min<std::size_t>(run, std::size(kCounts));
      if (!out.empty()) out.emplace_back("then");
      if (a == env::Action::kForward) {
        out.insert(out.end(), {"go", "forward"});
      } else {
        out.insert(out.end(), {"turn", a == env::Action::kLeft ? "left" : "right"});
      }
      out.emplace_back(kCounts[n - 1]);
      run -= n;
    }
  }
  if (!out.empty()) out.emplace_back("then");
  out.emplace_back("stop");
  return out;
}

World generate_world(const WorldConfig& config) {
  check_config(config);
  World w;
  w.config = config;
  Rng rng(config.seed);
  w.graph = build_grid(config, rng);

  for (const auto& t : template_words(config.marker_classes)) w.vocab.add(t);
  std::vector<std::string> fillers;
  for (std::size_t i = 0; w.vocab.size() < config.vocab_size; ++i) {
    const std::string f = i < std::size(kFillers) ? kFillers[i] : "filler" + std::to_string(i);
    w.vocab.add(f);
    fillers.push_back(f);
  }
  std::bernoulli_distribution use_filler(0.5);
  std::uniform_int_distribution<std::size_t> pick_filler(0, fillers.empty() ? 0 : fillers.size() - 1);
  auto with_filler = [&](std::vector<std::string> words) {
    if (!fillers.empty() && use_filler(rng)) words.insert(words.begin(), fillers[pick_filler(rng)]);
    return w.vocab.encode(words);
  };

  const std::size_t n = w.graph.num_nodes();
  std::vector<std::vector<Marker>> markers(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    markers[i] = place_markers(config, rng);
    w.features.emplace(w.graph.id(NodeIndex{i}), render(config, markers[i], rng));
  }
  const sdr::GridSpec grid = w.grid();
  auto target_of = [&](NodeIndex p, std::size_t k, bool right) {
    const Marker& m = markers[p.value][k];
    return sdr::cell_center({m.row, m.left_col + (right ? config.marker_gap : 0)}, grid.scale);
  };
  std::uniform_int_distribution<std::size_t> pick_class(0, config.marker_classes - 1);
  std::uniform_int_distribution<std::uint32_t> pick_pano(0, static_cast<std::uint32_t>(n - 1));
  std::bernoulli_distribution pick_side(0.5);
  auto sentence = [&](std::size_t k, bool right) {
    return with_filler({"the", right ? "right" : "left", "of", class_word(k), "pair"});
  };

  // SDR: sentences shared by 1..max_maps panoramas; (pano, class, side)
  // triples are never reused.
  std::set<std::tuple<std::uint32_t, std::size_t, bool>> used;
  std::size_t sentence_no = 0;
  for (const auto& [split, count] : {std::pair<std::string, std::size_t>{"train", config.sdr_train},
                                     std::pair<std::string, std::size_t>{"dev", config.sdr_dev}}) {
    std::size_t made = 0;
    while (made < count) {
      const std::size_t k = pick_class(rng);
      const bool right = pick_side(rng);
      std::uniform_int_distribution<std::size_t> maps(1, config.max_maps_per_sentence);
      const std::size_t m = std::min(maps(rng), count - made);
      const auto tokens = sentence(k, right);
      const std::string sid = "s" + pad3(sentence_no++);
      for (std::size_t j = 0, tries = 0; j < m;) {
        if (++tries > 100 * n) throw PreconditionError("cannot find unused panoramas for an SDR sentence");
        const NodeIndex p{pick_pano(rng)};
        if (!used.insert({p.value, k, right}).second) continue;
        w.sdr.push_back({sid, tokens, w.graph.id(p), target_of(p, k, right), split, {}});
        ++j;
        ++made;
      }
    }
  }

  // Navigation: full-length segments of shortest paths between random pairs.
  std::size_t nav_no = 0;
  for (const auto& [split, count] : {std::pair<std::string, std::size_t>{"train", config.nav_train},
                                     std::pair<std::string, std::size_t>{"dev", config.nav_dev},
                                     std::pair<std::string, std::size_t>{"test", config.nav_test}}) {
    std::size_t made = 0;
    std::size_t attempts = 0;
    while (made < count) {
      if (++attempts > 100 * count + 1000) throw PreconditionError("cannot sample enough navigation routes");
      std::uniform_int_distribution<std::uint64_t> seeds;
      for (Route& r : sample_route(w.graph, seeds(rng), config.route_min, config.route_max)) {
        if (made == count || r.size() < config.route_min) continue;
        const auto edges = w.graph.edges(r.front());
        std::uniform_int_distribution<std::size_t> slot(0, edges.size() - 1);
        const double heading = edges[slot(rng)].heading;
        const env::Execution demo = demonstration_from_route(w.graph, r, heading);
        NavExample ex{"nav" + pad3(nav_no++), with_filler(describe_actions(demo.actions())), r.front(),
                      heading, r, r.back(), split};
        if (split == "test") {
          const std::size_t k = pick_class(rng);
          const bool right = pick_side(rng);
          w.sdr.push_back({"s" + pad3(sentence_no++), sentence(k, right), w.graph.id(ex.goal),
                           target_of(ex.goal, k, right), "test", ex.id});
        }
        w.nav.push_back(std::move(ex));
        ++made;
      }
    }
  }
  return w;
}

}  // namespace streetnav::route
