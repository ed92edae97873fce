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
#include "streetnav/nav/models.hpp"

#include <algorithm>

#include "streetnav/common/error.hpp"
#include "streetnav/nav/observation.hpp"

namespace streetnav::nav {

using namespace tensor;

namespace {

const std::string kText = "nav.text";
constexpr std::size_t kStartAction = env::kNumActions;  // row of the start embedding

std::size_t action_index(Action a) { return static_cast<std::size_t>(a); }

}  // namespace

std::string_view to_string(ModelKind kind) { return kind == ModelKind::kRConcat ? "rconcat" : "ga"; }

ModelKind parse_model_kind(std::string_view name) {
  if (name == "rconcat") return ModelKind::kRConcat;
  if (name == "ga") return ModelKind::kGA;
  throw PreconditionError("unknown navigation model '" + std::string(name) + "'");
}

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::kNone: return "none";
    case Ablation::kNoText: return "no_text";
    case Ablation::kNoImage: return "no_image";
  }
  return "?";
}

Ablation parse_ablation(std::string_view name) {
  for (Ablation a : {Ablation::kNone, Ablation::kNoText, Ablation::kNoImage})
    if (to_string(a) == name) return a;
  throw PreconditionError("unknown ablation '" + std::string(name) + "'");
}

NavModel::NavModel(ModelConfig config)
    : config_(std::move(config)),
      encoder_(kText, config_.text.vocab_size == 0 ? text::EncoderDims{1, 1, 1} : config_.text) {
  const bool rconcat = config_.kind == ModelKind::kRConcat;
  convs_ = config_.convs;
  if (convs_.empty()) {
    convs_ = rconcat ? std::vector<ConvLayer>{{32, 8, 4}, {64, 4, 4}} : std::vector<ConvLayer>{{128, 8, 4}, {64, 4, 2}};
  }
  image_dim_ = config_.image_dim != 0 ? config_.image_dim : (rconcat ? 256 : 64);
  if (config_.ablation != Ablation::kNoText && config_.text.vocab_size == 0) {
    throw PreconditionError("nav model: vocabulary size not set");
  }
  if (config_.text.hidden_dim == 0 || config_.lstm_hidden == 0 || config_.action_dim == 0 || config_.time_dim == 0) {
    throw PreconditionError("nav model: sizes must be positive");
  }
  std::size_t h = config_.obs_height, w = config_.obs_width, c = 1;
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    const auto& l = convs_[i];
    if (l.channels == 0 || l.kernel == 0 || l.stride == 0) throw PreconditionError("nav model: bad conv layer");
    try {
      h = conv_output_size(h, l.kernel, l.stride, 0);
      w = conv_output_size(w, l.kernel, l.stride, 0);
    } catch (const ShapeError& e) {
      throw ShapeError("nav model conv layer " + std::to_string(i + 1) + ": " + e.what());
    }
    c = l.channels;
  }
  flat_dim_ = c * h * w;
}

void NavModel::init(ParamStore& store, Rng& rng) const {
  const auto& c = config_;
  const double s = c.init_scale;
  if (c.ablation != Ablation::kNoText) encoder_.init(store, rng, s);
  if (c.ablation != Ablation::kNoImage) {
    std::size_t in = 1;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      const auto& l = convs_[i];
      store.add("nav.conv" + std::to_string(i + 1) + ".w", {l.channels, in, l.kernel, l.kernel}, rng, s);
      store.add("nav.conv" + std::to_string(i + 1) + ".b", {l.channels}, rng, s);
      in = l.channels;
    }
    store.add("nav.img.w", {image_dim_, flat_dim_}, rng, s);
    store.add("nav.img.b", {image_dim_}, rng, s);
  }
  std::size_t lstm_in = 0;
  if (c.kind == ModelKind::kRConcat) {
    store.add("nav.action_emb", {env::kNumActions + 1, c.action_dim}, rng, s);
    lstm_in = text_dim() + image_dim_ + c.action_dim;
  } else {
    store.add("nav.gate.w", {image_dim_, text_dim()}, rng, s);
    store.add("nav.gate.b", {image_dim_}, rng, s);
    store.add("nav.ga_fc.w", {c.ga_hidden, image_dim_}, rng, s);
    store.add("nav.ga_fc.b", {c.ga_hidden}, rng, s);
    lstm_in = c.ga_hidden;
  }
  store.add("nav.lstm.wi", {4 * c.lstm_hidden, lstm_in}, rng, s);
  store.add("nav.lstm.wh", {4 * c.lstm_hidden, c.lstm_hidden}, rng, s);
  store.add("nav.lstm.b", {4 * c.lstm_hidden}, rng, s);
  store.add("nav.time_emb", {c.horizon + 1, c.time_dim}, rng, s);
  store.add("nav.out.w", {env::kNumActions, c.lstm_hidden + c.time_dim}, rng, s);
  store.add("nav.out.b", {env::kNumActions}, rng, s);
}

NavModel::Carry NavModel::begin(const Bindings& p, std::span<const std::size_t> tokens) const {
  Carry carry;
  carry.lstm = {Tensor::zeros({config_.lstm_hidden}), Tensor::zeros({config_.lstm_hidden})};
  carry.text = config_.ablation == Ablation::kNoText ? Tensor::zeros({text_dim()}) : encoder_.encode(p, tokens);
  return carry;
}

Tensor NavModel::image_features(const Bindings& p, const Tensor& obs) const {
  if (obs.rank() != 2 || obs.dim(0) != config_.obs_height || obs.dim(1) != config_.obs_width) {
    throw ShapeError("nav observation: expected (" + std::to_string(config_.obs_height) + ", " +
                     std::to_string(config_.obs_width) + "), got " + shape_str(obs.shape()));
  }
  if (config_.ablation == Ablation::kNoImage) return Tensor::zeros({image_dim_});
  Tensor x = reshape(obs, {1, obs.dim(0), obs.dim(1)});
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    const std::string n = "nav.conv" + std::to_string(i + 1);
    x = relu(add_bias(conv2d(x, p[n + ".w"], {convs_[i].stride, 0}), p[n + ".b"]));
  }
  return linear(reshape(x, {flat_dim_}), p["nav.img.w"], p["nav.img.b"]);
}

Tensor NavModel::gate(const Bindings& p, const Tensor& text) const {
  return sigmoid(linear(text, p["nav.gate.w"], p["nav.gate.b"]));
}

Tensor NavModel::step_logits(const Bindings& p, Carry& carry, const Tensor& obs, std::size_t t) const {
  const Tensor img = image_features(p, obs);
  Tensor in;
  if (config_.kind == ModelKind::kRConcat) {
    const std::size_t a = carry.prev ? action_index(*carry.prev) : kStartAction;
    const Tensor parts[] = {carry.text, img, embedding(p["nav.action_emb"], a)};
    in = concat(parts);
  } else {
    const Tensor u = mul(img, gate(p, carry.text));
    in = relu(linear(u, p["nav.ga_fc.w"], p["nav.ga_fc.b"]));
  }
  carry.lstm = lstm_step(in, carry.lstm, {p["nav.lstm.wi"], p["nav.lstm.wh"], p["nav.lstm.b"]});
  const Tensor parts[] = {carry.lstm.h, embedding(p["nav.time_emb"], std::min(t, config_.horizon))};
  return linear(concat(parts), p["nav.out.w"], p["nav.out.b"]);
}

std::vector<Tensor> demonstration_log_probs(const NavModel& model, const Bindings& params, const Episode& episode,
                                            const env::Execution& demo, std::size_t crop_width) {
  NavModel::Carry carry = model.begin(params, episode.example.tokens);
  std::vector<Tensor> out;
  out.reserve(demo.steps.size());
  for (std::size_t t = 0; t < demo.steps.size(); ++t) {
    const env::Step& step = demo.steps[t];
    const auto pano = episode.features(episode.graph.id(step.state.pano));
    const Tensor logits = model.step_logits(params, carry, heading_crop(*pano, step.state.heading, crop_width), t);
    out.push_back(pick(log_softmax(logits), action_index(step.action)));
    carry.prev = step.action;
  }
  return out;
}

Tensor demonstration_nll(const NavModel& model, const Bindings& params, const Episode& episode,
                         const env::Execution& demo, std::size_t crop_width) {
  Tensor total = Tensor::zeros({});
  for (const Tensor& lp : demonstration_log_probs(model, params, episode, demo, crop_width)) total = sub(total, lp);
  return total;
}

LearnedPolicy::LearnedPolicy(const NavModel& model, const ParamStore& params, std::size_t crop_width)
    : model_(model), params_(params.bind()), crop_width_(crop_width) {}

void LearnedPolicy::begin(const Episode& episode) {
  episode_.emplace(episode);
  carry_ = model_.begin(params_, episode.example.tokens);
}

ActionProbs LearnedPolicy::probabilities(std::size_t t, const env::State& state) {
  if (!episode_) throw PreconditionError("LearnedPolicy: begin() not called");
  const auto pano = episode_->features(episode_->graph.id(state.pano));
  const Tensor p = softmax(model_.step_logits(params_, carry_, heading_crop(*pano, state.heading, crop_width_), t));
  ActionProbs out;
  std::copy(p.data().begin(), p.data().end(), out.begin());
  return out;
}

Action LearnedPolicy::act(std::size_t t, const env::State& state, DecodeMode mode, Rng& rng) {
  const ActionProbs p = probabilities(t, state);
  const Action a = mode == DecodeMode::kGreedy ? argmax_action(p) : sample_action(p, rng);
  carry_.prev = a;
  return a;
}

}  // namespace streetnav::nav
