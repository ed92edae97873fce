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
#include "streetnav/text/encoder.hpp"

#include <vector>

#include "streetnav/common/error.hpp"

namespace streetnav::text {

using tensor::LstmState;
using tensor::LstmWeights;

namespace {

void check_dims(const EncoderDims& d) {
  if (d.vocab_size == 0 || d.embedding_dim == 0 || d.hidden_dim == 0) {
    throw PreconditionError("encoder dimensions must be positive");
  }
}

void add_lstm(ParamStore& store, const std::string& p, const EncoderDims& d, Rng& rng,
              double scale) {
  store.add(p + ".wi", {4 * d.hidden_dim, d.embedding_dim}, rng, scale);
  store.add(p + ".wh", {4 * d.hidden_dim, d.hidden_dim}, rng, scale);
  store.add(p + ".b", {4 * d.hidden_dim}, rng, scale);
}

LstmWeights lstm_weights(const Bindings& params, const std::string& p) {
  return {params[p + ".wi"], params[p + ".wh"], params[p + ".b"]};
}

std::vector<Tensor> embed(const Bindings& params, const std::string& prefix,
                          std::span<const std::size_t> ids, const EncodeOptions& opt) {
  if (ids.empty()) throw PreconditionError("cannot encode an empty token sequence");
  const Tensor& table = params[prefix + ".embedding"];
  std::vector<Tensor> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) {
    out.push_back(tensor::dropout(tensor::embedding(table, id), opt.embedding_dropout, opt.rng));
  }
  return out;
}

LstmState zero_state(std::size_t hidden) {
  return {Tensor::zeros({hidden}), Tensor::zeros({hidden})};
}

}  // namespace

LstmEncoder::LstmEncoder(std::string prefix, EncoderDims dims)
    : prefix_(std::move(prefix)), dims_(dims) {
  check_dims(dims_);
}

void LstmEncoder::init(ParamStore& store, Rng& rng, double init_scale) const {
  store.add(prefix_ + ".embedding", {dims_.vocab_size, dims_.embedding_dim}, rng, init_scale);
  add_lstm(store, prefix_ + ".fwd", dims_, rng, init_scale);
}

Tensor LstmEncoder::encode(const Bindings& params, std::span<const std::size_t> ids,
                           EncodeOptions opt) const {
  const auto xs = embed(params, prefix_, ids, opt);
  const LstmWeights w = lstm_weights(params, prefix_ + ".fwd");
  LstmState s = zero_state(dims_.hidden_dim);
  for (const Tensor& x : xs) s = tensor::lstm_step(x, s, w);
  return s.h;
}

BiLstmEncoder::BiLstmEncoder(std::string prefix, EncoderDims dims)
    : prefix_(std::move(prefix)), dims_(dims) {
  check_dims(dims_);
}

void BiLstmEncoder::init(ParamStore& store, Rng& rng, double init_scale) const {
  store.add(prefix_ + ".embedding", {dims_.vocab_size, dims_.embedding_dim}, rng, init_scale);
  add_lstm(store, prefix_ + ".fwd", dims_, rng, init_scale);
  add_lstm(store, prefix_ + ".bwd", dims_, rng, init_scale);
}

Tensor BiLstmEncoder::encode(const Bindings& params, std::span<const std::size_t> ids,
                             EncodeOptions opt) const {
  const auto xs = embed(params, prefix_, ids, opt);
  const std::size_t l = xs.size();
  const LstmWeights wf = lstm_weights(params, prefix_ + ".fwd");
  const LstmWeights wb = lstm_weights(params, prefix_ + ".bwd");

  std::vector<Tensor> fwd(l), bwd(l);
  LstmState s = zero_state(dims_.hidden_dim);
  for (std::size_t i = 0; i < l; ++i) fwd[i] = (s = tensor::lstm_step(xs[i], s, wf)).h;
  s = zero_state(dims_.hidden_dim);
  for (std::size_t i = l; i-- > 0;) bwd[i] = (s = tensor::lstm_step(xs[i], s, wb)).h;

  std::vector<Tensor> joined;
  joined.reserve(l);
  for (std::size_t i = 0; i < l; ++i) {
    const Tensor pair[] = {fwd[i], bwd[i]};
    joined.push_back(tensor::concat(pair));
  }
  return tensor::mean_of(joined);
}

}  // namespace streetnav::text
