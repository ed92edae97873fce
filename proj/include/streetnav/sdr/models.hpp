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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "streetnav/text/encoder.hpp"

namespace streetnav::sdr {

using tensor::Bindings;
using tensor::ParamStore;
using tensor::Tensor;

enum class ModelKind { kLingUNet, kUNet, kConcat, kConcatConv, kText2Conv };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelConfig {
  ModelKind kind = ModelKind::kLingUNet;
  std::size_t channels = 128;  // input feature channels
  std::size_t levels = 2;      // LingUNet / UNet depth m
  // Channels of CNN_k / Deconv_k; empty means `channels` at every level.
  std::vector<std::size_t> level_channels;
  std::size_t mlp_hidden = 128;
  text::EncoderDims text{0, 300, 300};
  double init_scale = 0.1;
};

// Shared interface over the five scoring architectures. All models map
// (features (C, H, W), tokens) to per-pixel scores (H, W); the distribution
// is their softmax over all pixels.
class SdrModel {
 public:
  explicit SdrModel(ModelConfig config);

  void init(ParamStore& store, Rng& rng) const;
  // Shapes of the non-encoder parameters, in initialization order.
  std::vector<std::pair<std::string, tensor::Shape>> param_shapes() const;

  Tensor logits(const Bindings& params, const Tensor& features, std::span<const std::size_t> tokens,
                text::EncodeOptions opt = {}) const;
  Tensor distribution(const Bindings& params, const Tensor& features,
                      std::span<const std::size_t> tokens, text::EncodeOptions opt = {}) const;

  bool uses_text() const { return config_.kind != ModelKind::kUNet; }
  const ModelConfig& config() const { return config_; }
  std::size_t level_channels(std::size_t k) const;  // k in [1, levels]

 private:
  Tensor unet_logits(const Bindings& p, const Tensor& f, const Tensor* text) const;
  Tensor head(const Bindings& p, const Tensor& x) const;

  ModelConfig config_;
  text::BiLstmEncoder encoder_;
};

}  // namespace streetnav::sdr
