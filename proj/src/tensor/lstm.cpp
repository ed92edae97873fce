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
#include "streetnav/common/error.hpp"
#include "streetnav/tensor/ops.hpp"

namespace streetnav::tensor {

LstmState lstm_step(const Tensor& x, const LstmState& prev, const LstmWeights& w) {
  if (w.hidden.rank() != 2 || w.hidden.dim(0) != 4 * w.hidden.dim(1)) {
    throw ShapeError("lstm_step: hidden weight must be (4H,H), got " + shape_str(w.hidden.shape()));
  }
  const std::size_t h = w.hidden.dim(1);
  if (prev.h.shape() != Shape{h} || prev.c.shape() != Shape{h}) {
    throw ShapeError("lstm_step: state " + shape_str(prev.h.shape()) + "/" +
                     shape_str(prev.c.shape()) + " vs hidden size " + std::to_string(h));
  }
  Tensor gates = add(linear(x, w.input, w.bias), linear(prev.h, w.hidden));
  auto parts = split(gates, 4);
  Tensor in_gate = sigmoid(parts[0]);
  Tensor forget_gate = sigmoid(parts[1]);
  Tensor candidate = tanh(parts[2]);
  Tensor out_gate = sigmoid(parts[3]);
  Tensor c = add(mul(forget_gate, prev.c), mul(in_gate, candidate));
  Tensor hn = mul(out_gate, tanh(c));
  return {hn, c};
}

}  // namespace streetnav::tensor
