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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "streetnav/nav/policy.hpp"
#include "streetnav/text/encoder.hpp"

namespace streetnav::nav {

using tensor::Bindings;
using tensor::ParamStore;
using tensor::Tensor;

enum class ModelKind { kRConcat, kGA };
enum class Ablation { kNone, kNoText, kNoImage };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(Ablation a);
Ablation parse_ablation(std::string_view name);

struct ConvLayer {
  std::size_t channels = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
};

struct ModelConfig {
  ModelKind kind = ModelKind::kRConcat;
  Ablation ablation = Ablation::kNone;
  std::size_t obs_height = 100;
  std::size_t obs_width = 100;
  std::vector<ConvLayer> convs;  // empty selects the per-model default
  std::size_t image_dim = 0;     // 0 selects 256 (RConcat) or 64 (GA)
  std::size_t ga_hidden = 256;   // GA: v_t size
  text::EncoderDims text{0, 32, 256};
  std::size_t action_dim = 16;
  std::size_t time_dim = 32;
  std::size_t lstm_hidden = 256;
  // Time-step embeddings cover steps 0..horizon; later steps reuse the last.
  std::size_t horizon = kTrainHorizon;
  double init_scale = 0.1;
};

// Recurrent navigation policy network.
//
// RConcat: [text; I'_t; a_{t-1}] -> LSTM -> [h_t; time_t] -> logits.
// GA:      v_t = ReLU(FC(I'_t * sigmoid(FC(text)))) -> LSTM -> [h_t; time_t] -> logits.
// I'_t is a conv stack (ReLU after each layer) on the observation followed
// by a fully-connected layer. Ablations replace the text vector or I'_t with
// zeros.
class NavModel {
 public:
  explicit NavModel(ModelConfig config);

  void init(ParamStore& store, Rng& rng) const;

  struct Carry {
    tensor::LstmState lstm;
    Tensor text;
    std::optional<Action> prev;  // unset before the first action
  };

  Carry begin(const Bindings& params, std::span<const std::size_t> tokens) const;
  // Action logits (kAllActions order) for step t; advances carry.lstm. The
  // caller records the chosen action in carry.prev.
  Tensor step_logits(const Bindings& params, Carry& carry, const Tensor& observation, std::size_t t) const;

  Tensor image_features(const Bindings& params, const Tensor& observation) const;
  Tensor gate(const Bindings& params, const Tensor& text) const;  // GA only

  const ModelConfig& config() const { return config_; }
  std::size_t image_dim() const { return image_dim_; }
  std::size_t text_dim() const { return config_.text.hidden_dim; }

 private:
  ModelConfig config_;
  std::vector<ConvLayer> convs_;
  std::size_t image_dim_ = 0;
  std::size_t flat_dim_ = 0;
  text::LstmEncoder encoder_;
};

// log p(a_i | context_i) for each demonstration step under teacher forcing.
std::vector<Tensor> demonstration_log_probs(const NavModel& model, const Bindings& params, const Episode& episode,
                                            const env::Execution& demonstration, std::size_t crop_width);

// Sum over the demonstration of -log p(a_i | context_i) under teacher forcing.
Tensor demonstration_nll(const NavModel& model, const Bindings& params, const Episode& episode,
                         const env::Execution& demonstration, std::size_t crop_width);

// Policy backed by a NavModel and fixed parameters.
class LearnedPolicy final : public Policy {
 public:
  LearnedPolicy(const NavModel& model, const ParamStore& params, std::size_t crop_width);
  void begin(const Episode& episode) override;
  Action act(std::size_t t, const env::State& state, DecodeMode mode, Rng& rng) override;
  ActionProbs probabilities(std::size_t t, const env::State& state);

 private:
  const NavModel& model_;
  Bindings params_;
  std::size_t crop_width_;
  std::optional<Episode> episode_;  // holds references only
  NavModel::Carry carry_;
};

}  // namespace streetnav::nav
