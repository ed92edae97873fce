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
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "streetnav/tensor/tensor.hpp"

namespace streetnav::sdr {

// C x H x W grid of float features, channel-major.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t channels, std::size_t height, std::size_t width);
  FeatureMap(std::size_t channels, std::size_t height, std::size_t width, std::vector<float> data);

  std::size_t channels() const { return c_; }
  std::size_t height() const { return h_; }
  std::size_t width() const { return w_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<float>& data() const { return data_; }

  float at(std::size_t c, std::size_t y, std::size_t x) const { return data_[(c * h_ + y) * w_ + x]; }
  float& at(std::size_t c, std::size_t y, std::size_t x) { return data_[(c * h_ + y) * w_ + x]; }

  // Constant (C, H, W) tensor of the features widened to double.
  tensor::Tensor to_tensor() const;

  bool operator==(const FeatureMap&) const = default;

  // .fmap: magic "TDFM", u32 C, u32 H, u32 W, then C*H*W float32, all
  // little-endian.
  void save(std::ostream& out) const;
  static FeatureMap load(std::istream& in, const std::string& source = "fmap");
  void save(const std::filesystem::path& file) const;
  static FeatureMap load(const std::filesystem::path& file);

 private:
  std::size_t c_ = 0, h_ = 0, w_ = 0;
  std::vector<float> data_;
};

// Resolves a panorama id to its feature map; throws LookupError if absent.
using FeatureLookup = std::function<std::shared_ptr<const FeatureMap>(const std::string& pano)>;

}  // namespace streetnav::sdr
