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
#include <vector>

#include "streetnav/common/rng.hpp"
#include "streetnav/tensor/tensor.hpp"

// Differentiable operators. Shape violations throw ShapeError naming the op
// and the offending shapes.
namespace streetnav::tensor {

// Elementwise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);

// Sum of all elements, as a scalar.
Tensor sum(const Tensor& x);
// Average of equally shaped tensors.
Tensor mean_of(std::span<const Tensor> xs);

// W (out,in) times x (in), plus b (out) when defined.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b = Tensor());
// (m,k) x (k,n) -> (m,n).
Tensor matmul(const Tensor& a, const Tensor& b);
// Adds b (C) to every element of channel c of x (C, ...).
Tensor add_bias(const Tensor& x, const Tensor& b);

// Concatenation / slicing along dimension 0 (channels for (C,H,W), entries
// for vectors). Remaining dimensions must agree.
Tensor concat(std::span<const Tensor> xs);
Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor slice(const Tensor& x, std::size_t start, std::size_t length);
// Splits x along dimension 0 into `parts` equal slices.
std::vector<Tensor> split(const Tensor& x, std::size_t parts);
Tensor reshape(const Tensor& x, Shape shape);

// Row `id` of table (V, D). Ids are constants; the table receives gradient.
Tensor embedding(const Tensor& table, std::size_t id);
// Replicates v (D) at every pixel: (D, height, width).
Tensor broadcast_pixels(const Tensor& v, std::size_t height, std::size_t width);

// Inverted dropout: each element is zeroed with probability p and survivors
// are scaled by 1/(1-p). With rng == nullptr it is the identity (inference).
// The mask is a constant on the tape.
Tensor dropout(const Tensor& x, double p, Rng* rng);

// Softmax over all elements of x (any shape), max-subtracted. Throws
// NumericError on NaN input.
Tensor softmax(const Tensor& x);
Tensor log_softmax(const Tensor& x);
// sum t * ln(t / p) with 0 ln 0 = 0. `target` is treated as a constant.
// Throws NumericError when p == 0 where t > 0.
Tensor kl_divergence(const Tensor& target, const Tensor& predicted);
// Same quantity computed from unnormalized scores through log_softmax.
Tensor kl_divergence_logits(const Tensor& target, const Tensor& logits);
// Element i of x as a scalar.
Tensor pick(const Tensor& x, std::size_t i);

struct Conv2dOptions {
  std::size_t stride = 1;
  std::size_t padding = 0;
};

// Cross-correlation of x (Cin,H,W) with kernel (Cout,Cin,kh,kw).
// Output (Cout, (H+2p-kh)/s+1, (W+2p-kw)/s+1); the division must be exact.
Tensor conv2d(const Tensor& x, const Tensor& kernel, Conv2dOptions opt = {});
// Transposed convolution of x (Cin,H,W) with kernel (Cin,Cout,kh,kw); the
// adjoint of conv2d with the same kernel, stride and padding.
// Output (Cout, (H-1)s-2p+kh, (W-1)s-2p+kw).
Tensor deconv2d(const Tensor& x, const Tensor& kernel, Conv2dOptions opt = {});

// Output spatial extent of conv2d; throws ShapeError if not integral or empty.
std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride,
                             std::size_t padding);

struct LstmWeights {
  Tensor input;   // (4H, D)
  Tensor hidden;  // (4H, H)
  Tensor bias;    // (4H)
};

struct LstmState {
  Tensor h;
  Tensor c;
};

// One LSTM cell step. Gate blocks in the weight rows are ordered
// input, forget, candidate, output.
LstmState lstm_step(const Tensor& x, const LstmState& prev, const LstmWeights& w);

}  // namespace streetnav::tensor
