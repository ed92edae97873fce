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
#include "streetnav/sdr/models.hpp"

#include "streetnav/common/error.hpp"

namespace streetnav::sdr {

using namespace tensor;

namespace {

constexpr Conv2dOptions kSame5{1, 2};
const std::string kText = "sdr.text";

std::string lvl(const char* what, std::size_t k) { return std::string("sdr.") + what + std::to_string(k); }

void check_features(const Tensor& f, std::size_t channels) {
  if (f.rank() != 3 || f.dim(0) != channels) {
    throw ShapeError("sdr input: expected features (" + std::to_string(channels) + ", H, W), got " +
                     shape_str(f.shape()));
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLingUNet: return "lingunet";
    case ModelKind::kUNet: return "unet";
    case ModelKind::kConcat: return "concat";
    case ModelKind::kConcatConv: return "concatconv";
    case ModelKind::kText2Conv: return "text2conv";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::kLingUNet, ModelKind::kUNet, ModelKind::kConcat,
                      ModelKind::kConcatConv, ModelKind::kText2Conv}) {
    if (to_string(k) == name) return k;
  }
  throw PreconditionError("unknown SDR model '" + std::string(name) + "'");
}

SdrModel::SdrModel(ModelConfig config)
    : config_(std::move(config)),
      encoder_(kText, config_.text.vocab_size == 0 ? text::EncoderDims{1, 1, 1} : config_.text) {
  const auto& c = config_;
  if (c.channels == 0 || c.mlp_hidden == 0) throw PreconditionError("sdr model: sizes must be positive");
  if (uses_text() && c.text.vocab_size == 0) throw PreconditionError("sdr model: vocabulary size not set");
  if (c.kind == ModelKind::kLingUNet || c.kind == ModelKind::kUNet) {
    if (c.levels == 0) throw PreconditionError("sdr model: levels must be positive");
    if (!c.level_channels.empty() && c.level_channels.size() != c.levels) {
      throw PreconditionError("sdr model: level_channels has " + std::to_string(c.level_channels.size()) +
                              " entries for " + std::to_string(c.levels) + " levels");
    }
    if (c.kind == ModelKind::kLingUNet && encoder_.output_dim() % c.levels != 0) {
      throw ShapeError("lingunet: text dimension " + std::to_string(encoder_.output_dim()) +
                       " not divisible by " + std::to_string(c.levels) + " levels");
    }
  }
}

std::size_t SdrModel::level_channels(std::size_t k) const {
  return config_.level_channels.empty() ? config_.channels : config_.level_channels.at(k - 1);
}

std::vector<std::pair<std::string, Shape>> SdrModel::param_shapes() const {
  const auto& c = config_;
  const std::size_t t = encoder_.output_dim();
  std::vector<std::pair<std::string, Shape>> out;
  std::size_t head_in = c.channels;
  switch (c.kind) {
    case ModelKind::kLingUNet:
    case ModelKind::kUNet: {
      for (std::size_t k = 1; k <= c.levels; ++k) {
        const std::size_t in = k == 1 ? c.channels : level_channels(k - 1), ck = level_channels(k);
        out.push_back({lvl("cnn", k) + ".w", {ck, in, 5, 5}});
        out.push_back({lvl("cnn", k) + ".b", {ck}});
        if (c.kind == ModelKind::kLingUNet) out.push_back({lvl("text_proj", k), {ck * ck, t / c.levels}});
        const std::size_t din = k == c.levels ? ck : level_channels(k + 1) + ck;
        out.push_back({lvl("deconv", k) + ".w", {din, ck, 5, 5}});
        out.push_back({lvl("deconv", k) + ".b", {ck}});
      }
      head_in = level_channels(1);
      break;
    }
    case ModelKind::kConcat:
      head_in = c.channels + t;
      break;
    case ModelKind::kConcatConv:
      out.push_back({"sdr.mix.w", {c.channels, c.channels + t, 5, 5}});
      out.push_back({"sdr.mix.b", {c.channels}});
      break;
    case ModelKind::kText2Conv:
      out.push_back({"sdr.text_proj", {c.channels * c.channels * 25, t}});
      break;
  }
  out.push_back({"sdr.head.w1", {c.mlp_hidden, head_in, 1, 1}});
  out.push_back({"sdr.head.b1", {c.mlp_hidden}});
  out.push_back({"sdr.head.w2", {1, c.mlp_hidden, 1, 1}});
  out.push_back({"sdr.head.b2", {1}});
  return out;
}

void SdrModel::init(ParamStore& store, Rng& rng) const {
  if (uses_text()) encoder_.init(store, rng, config_.init_scale);
  for (auto& [name, shape] : param_shapes()) store.add(name, shape, rng, config_.init_scale);
}

// Per-pixel two-layer perceptron, written as 1x1 convolutions.
Tensor SdrModel::head(const Bindings& p, const Tensor& x) const {
  Tensor h = relu(add_bias(conv2d(x, p["sdr.head.w1"]), p["sdr.head.b1"]));
  Tensor s = add_bias(conv2d(h, p["sdr.head.w2"]), p["sdr.head.b2"]);
  return reshape(s, {x.dim(1), x.dim(2)});
}

Tensor SdrModel::unet_logits(const Bindings& p, const Tensor& f0, const Tensor* text) const {
  const std::size_t m = config_.levels;
  std::vector<Tensor> f(m + 1), g(m + 1);
  f[0] = f0;
  for (std::size_t k = 1; k <= m; ++k) {
    f[k] = relu(add_bias(conv2d(f[k - 1], p[lvl("cnn", k) + ".w"], kSame5), p[lvl("cnn", k) + ".b"]));
  }
  if (text != nullptr) {
    const auto slices = split(*text, m);
    for (std::size_t k = 1; k <= m; ++k) {
      const std::size_t ck = level_channels(k);
      Tensor kernel = reshape(linear(slices[k - 1], p[lvl("text_proj", k)]), {ck, ck, 1, 1});
      g[k] = conv2d(f[k], kernel);
    }
  } else {
    for (std::size_t k = 1; k <= m; ++k) g[k] = f[k];
  }
  Tensor h;
  for (std::size_t k = m; k >= 1; --k) {
    Tensor in = k == m ? g[k] : concat_channels(h, g[k]);
    h = add_bias(deconv2d(in, p[lvl("deconv", k) + ".w"], kSame5), p[lvl("deconv", k) + ".b"]);
    if (k > 1) h = relu(h);
  }
  return head(p, h);
}

Tensor SdrModel::logits(const Bindings& p, const Tensor& features,
                        std::span<const std::size_t> tokens, text::EncodeOptions opt) const {
  const auto& c = config_;
  check_features(features, c.channels);
  if (c.kind == ModelKind::kUNet) return unet_logits(p, features, nullptr);

  const Tensor x = encoder_.encode(p, tokens, opt);
  const std::size_t hgt = features.dim(1), wid = features.dim(2);
  switch (c.kind) {
    case ModelKind::kLingUNet:
      return unet_logits(p, features, &x);
    case ModelKind::kConcat:
      return head(p, concat_channels(features, broadcast_pixels(x, hgt, wid)));
    case ModelKind::kConcatConv: {
      Tensor joined = concat_channels(features, broadcast_pixels(x, hgt, wid));
      return head(p, relu(add_bias(conv2d(joined, p["sdr.mix.w"], kSame5), p["sdr.mix.b"])));
    }
    case ModelKind::kText2Conv: {
      Tensor kernel = reshape(linear(x, p["sdr.text_proj"]), {c.channels, c.channels, 5, 5});
      return head(p, conv2d(features, kernel, kSame5));
    }
    case ModelKind::kUNet:
      break;
  }
  throw PreconditionError("bad model kind");
}

Tensor SdrModel::distribution(const Bindings& p, const Tensor& features,
                              std::span<const std::size_t> tokens, text::EncodeOptions opt) const {
  return softmax(logits(p, features, tokens, opt));
}

}  // namespace streetnav::sdr
