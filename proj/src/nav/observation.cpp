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
#include "streetnav/nav/observation.hpp"

#include <cmath>
#include <vector>

#include "streetnav/common/error.hpp"

namespace streetnav::nav {

std::size_t crop_start(std::size_t width, double heading, std::size_t crop_width) {
  const auto w = static_cast<long long>(width);
  const auto center = static_cast<long long>(std::llround(heading * static_cast<double>(width) / 360.0));
  const long long start = center - static_cast<long long>(crop_width / 2);
  return static_cast<std::size_t>(((start % w) + w) % w);
}

tensor::Tensor heading_crop(const sdr::FeatureMap& pano, double heading, std::size_t crop_width) {
  if (crop_width == 0 || crop_width > pano.width()) {
    throw PreconditionError("heading_crop: crop width " + std::to_string(crop_width) + " not in [1, " +
                            std::to_string(pano.width()) + "]");
  }
  const std::size_t h = pano.height(), w = pano.width(), c = pano.channels();
  const std::size_t start = crop_start(w, heading, crop_width);
  std::vector<double> out(h * crop_width, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t j = 0; j < crop_width; ++j) out[y * crop_width + j] += pano.at(ch, y, (start + j) % w);
  for (double& v : out) v /= static_cast<double>(c);
  return tensor::Tensor::from({h, crop_width}, std::move(out));
}

}  // namespace streetnav::nav
