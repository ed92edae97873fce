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
#include "streetnav/sdr/targets.hpp"

#include <cmath>
#include <string>

#include "streetnav/common/error.hpp"

namespace streetnav::sdr {

Cell cell_of(const Point& p, const GridSpec& grid) {
  if (grid.height == 0 || grid.width == 0 || grid.scale <= 0.0) {
    throw PreconditionError("grid dimensions and scale must be positive");
  }
  if (!(p.x >= 0.0 && p.y >= 0.0 && p.x < grid.image_width() && p.y < grid.image_height())) {
    throw PreconditionError("target (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                            ") outside image " + std::to_string(grid.image_width()) + "x" +
                            std::to_string(grid.image_height()));
  }
  return {static_cast<std::size_t>(std::floor(p.y / grid.scale)),
          static_cast<std::size_t>(std::floor(p.x / grid.scale))};
}

Point cell_center(const Cell& cell, double scale) {
  return {static_cast<double>(cell.col) * scale + scale / 2.0,
          static_cast<double>(cell.row) * scale + scale / 2.0};
}

tensor::Tensor gaussian_target(const Point& target, const GridSpec& grid, double sigma) {
  if (!(sigma > 0.0)) throw PreconditionError("gaussian_target: sigma must be positive");
  const Cell c = cell_of(target, grid);
  std::vector<double> v(grid.height * grid.width);
  double total = 0.0;
  for (std::size_t r = 0; r < grid.height; ++r) {
    for (std::size_t x = 0; x < grid.width; ++x) {
      const double dr = static_cast<double>(r) - static_cast<double>(c.row);
      const double dc = static_cast<double>(x) - static_cast<double>(c.col);
      const double p = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
      v[r * grid.width + x] = p;
      total += p;
    }
  }
  for (double& p : v) p /= total;
  return tensor::Tensor::from({grid.height, grid.width}, std::move(v));
}

Point predict_location(const tensor::Tensor& dist, double scale) {
  if (dist.rank() != 2 || dist.numel() == 0) {
    throw ShapeError("predict_location: expected a non-empty (H, W) tensor, got " +
                     tensor::shape_str(dist.shape()));
  }
  auto d = dist.data();
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] > d[best]) best = i;
  }
  const std::size_t w = dist.dim(1);
  return cell_center({best / w, best % w}, scale);
}

Baseline parse_baseline(std::string_view name) {
  if (name == "random") return Baseline::kRandom;
  if (name == "center") return Baseline::kCenter;
  if (name == "average") return Baseline::kAverage;
  throw PreconditionError("unknown SDR baseline '" + std::string(name) + "'");
}

Point nonlearning_predict(Baseline kind, double image_width, double image_height,
                          std::span<const Point> training, Rng& rng) {
  switch (kind) {
    case Baseline::kRandom: {
      std::uniform_int_distribution<long> xs(0, static_cast<long>(image_width) - 1);
      std::uniform_int_distribution<long> ys(0, static_cast<long>(image_height) - 1);
      const double x = static_cast<double>(xs(rng));
      return {x, static_cast<double>(ys(rng))};
    }
    case Baseline::kCenter:
      return {std::floor(image_width / 2.0), std::floor(image_height / 2.0)};
    case Baseline::kAverage: {
      if (training.empty()) throw PreconditionError("average baseline needs training targets");
      double sx = 0.0, sy = 0.0;
      for (const auto& p : training) {
        sx += p.x;
        sy += p.y;
      }
      const double n = static_cast<double>(training.size());
      return {std::round(sx / n), std::round(sy / n)};
    }
  }
  throw PreconditionError("bad baseline kind");
}

}  // namespace streetnav::sdr
