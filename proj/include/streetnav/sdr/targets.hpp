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
#include <span>
#include <string_view>

#include "streetnav/common/rng.hpp"
#include "streetnav/metrics/metrics.hpp"
#include "streetnav/tensor/tensor.hpp"

namespace streetnav::sdr {

using metrics::Point;

// Feature grid and its image-pixel scale (image = grid * scale).
struct GridSpec {
  std::size_t height = 0;
  std::size_t width = 0;
  double scale = 1.0;

  double image_width() const { return static_cast<double>(width) * scale; }
  double image_height() const { return static_cast<double>(height) * scale; }
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const Cell&) const = default;
};

// Grid cell containing an image point; throws PreconditionError outside the image.
Cell cell_of(const Point& image_point, const GridSpec& grid);
// Image coordinates of a cell's center.
Point cell_center(const Cell& cell, double scale);

// Isotropic Gaussian (sigma in cells) evaluated at cell centers around the
// target's cell, normalized to sum 1. Shape (H, W).
tensor::Tensor gaussian_target(const Point& target, const GridSpec& grid, double sigma = 3.0);

// Mode of an (H, W) distribution, first in row-major order on ties, as the
// image coordinates of the cell center.
Point predict_location(const tensor::Tensor& distribution, double scale);

enum class Baseline { kRandom, kCenter, kAverage };
Baseline parse_baseline(std::string_view name);

// Predictions in image pixels for image size (width, height). `training`
// is only used by kAverage; `rng` only by kRandom.
Point nonlearning_predict(Baseline kind, double image_width, double image_height,
                          std::span<const Point> training, Rng& rng);

}  // namespace streetnav::sdr
