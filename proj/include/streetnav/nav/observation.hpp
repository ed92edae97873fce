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

#include "streetnav/sdr/feature_map.hpp"
#include "streetnav/tensor/tensor.hpp"

namespace streetnav::nav {

// Heading-centred observation: the panorama grid is rotated along its width
// so the heading's column lands at crop column floor(crop_width / 2), the
// crop is cut with wraparound, and channels are averaged. Returns
// (H, crop_width).
tensor::Tensor heading_crop(const sdr::FeatureMap& pano, double heading, std::size_t crop_width);

// First panorama column of the crop (in [0, W)).
std::size_t crop_start(std::size_t width, double heading, std::size_t crop_width);

}  // namespace streetnav::nav
