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

#include "streetnav/common/rng.hpp"
#include "streetnav/tensor/ops.hpp"
#include "streetnav/tensor/param_store.hpp"

namespace streetnav::text {

using tensor::Bindings;
using tensor::ParamStore;
using tensor::Tensor;

struct EncoderDims {
  std::size_t vocab_size = 0;
  std::size_t embedding_dim = 0;
  std::size_t hidden_dim = 0;  // per direction
};

// Options for a single forward pass. Dropout on word embeddings is applied
// only when `rng` is set.
struct EncodeOptions {
  double embedding_dropout = 0.0;
  Rng* rng = nullptr;
};

// Single-layer forward LSTM; returns the hidden state after the last token.
//
// Parameters: <prefix>.embedding (V, E), <prefix>.fwd.{wi,wh,b}.
class LstmEncoder {
 public:
  LstmEncoder(std::string prefix, EncoderDims dims);

  void init(ParamStore& store, Rng& rng, double init_scale = 0.1) const;
  Tensor encode(const Bindings& params, std::span<const std::size_t> ids,
                EncodeOptions opt = {}) const;
  std::size_t output_dim() const { return dims_.hidden_dim; }
  const EncoderDims& dims() const { return dims_; }

 private:
  std::string prefix_;
  EncoderDims dims_;
};

// Forward and backward LSTMs over a shared embedding table; returns the mean
// over positions of [h_fwd_i ; h_bwd_i], so the output is 2 * hidden_dim.
//
// Parameters: <prefix>.embedding, <prefix>.fwd.*, <prefix>.bwd.*.
class BiLstmEncoder {
 public:
  BiLstmEncoder(std::string prefix, EncoderDims dims);

  void init(ParamStore& store, Rng& rng, double init_scale = 0.1) const;
  Tensor encode(const Bindings& params, std::span<const std::size_t> ids,
                EncodeOptions opt = {}) const;
  std::size_t output_dim() const { return 2 * dims_.hidden_dim; }
  const EncoderDims& dims() const { return dims_; }

 private:
  std::string prefix_;
  EncoderDims dims_;
};

}  // namespace streetnav::text
