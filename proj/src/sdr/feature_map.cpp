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
#include "streetnav/sdr/feature_map.hpp"

#include <cmath>
#include <fstream>

#include "streetnav/common/binary_io.hpp"
#include "streetnav/common/error.hpp"

namespace streetnav::sdr {

namespace {
constexpr std::uint32_t kMaxDim = 1u << 16;
}

FeatureMap::FeatureMap(std::size_t channels, std::size_t height, std::size_t width)
    : FeatureMap(channels, height, width, std::vector<float>(channels * height * width, 0.0f)) {}

FeatureMap::FeatureMap(std::size_t channels, std::size_t height, std::size_t width,
                       std::vector<float> data)
    : c_(channels), h_(height), w_(width), data_(std::move(data)) {
  if (c_ == 0 || h_ == 0 || w_ == 0) throw PreconditionError("feature map dimensions must be positive");
  if (data_.size() != c_ * h_ * w_) {
    throw ShapeError("feature map: " + std::to_string(data_.size()) + " values for shape (" +
                     std::to_string(c_) + ", " + std::to_string(h_) + ", " + std::to_string(w_) + ")");
  }
}

tensor::Tensor FeatureMap::to_tensor() const {
  return tensor::Tensor::from({c_, h_, w_}, std::vector<double>(data_.begin(), data_.end()));
}

void FeatureMap::save(std::ostream& out) const {
  out.write("TDFM", 4);
  io::write_le(out, static_cast<std::uint32_t>(c_));
  io::write_le(out, static_cast<std::uint32_t>(h_));
  io::write_le(out, static_cast<std::uint32_t>(w_));
  for (float v : data_) io::write_le(out, v);
}

FeatureMap FeatureMap::load(std::istream& in, const std::string& source) {
  io::expect_magic(in, "TDFM", source);
  std::uint32_t dims[3];
  const char* names[3] = {"channels", "height", "width"};
  for (int i = 0; i < 3; ++i) {
    dims[i] = io::read_le<std::uint32_t>(in, source, names[i]);
    if (dims[i] == 0 || dims[i] > kMaxDim) {
      throw ParseError(source, 0, std::string(names[i]) + " " + std::to_string(dims[i]) +
                                      " out of range [1, " + std::to_string(kMaxDim) + "]");
    }
  }
  const std::size_t n = std::size_t{dims[0]} * dims[1] * dims[2];
  if (n > (std::size_t{1} << 28)) throw ParseError(source, 0, "feature map too large");
  std::vector<float> data(n);
  for (float& v : data) {
    v = io::read_le<float>(in, source, "feature values");
    if (!std::isfinite(v)) throw ParseError(source, 0, "non-finite feature value");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError(source, 0, "trailing bytes after feature values");
  return FeatureMap(dims[0], dims[1], dims[2], std::move(data));
}

void FeatureMap::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  save(out);
}

FeatureMap FeatureMap::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError(file.string(), 0, "cannot open file");
  return load(in, file.string());
}

}  // namespace streetnav::sdr
