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
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace streetnav::tensor {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

// One vertex of the dynamic tape. A node owns its forward value and, once
// backward reaches it, a gradient buffer of the same length.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad and accumulates into the parents' grad buffers.
  std::function<void(Node&)> backward;

  std::vector<double>& grad_buffer() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

// Dense row-major float64 array with reverse-mode gradient tracking. Copies
// are shallow: two Tensor handles may refer to the same tape node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, double v, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t i) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  // Direct write access; intended for leaves (parameters, inputs).
  std::span<double> mutable_data();
  // Empty until backward has produced a gradient for this tensor.
  std::span<const double> grad() const;
  bool requires_grad() const;

  double item() const;
  double operator[](std::size_t i) const { return data()[i]; }

  // Reverse sweep from this scalar; gradients accumulate into every reachable
  // node that requires them.
  void backward() const;
  void zero_grad();

  // False if any element is NaN or infinite.
  bool finite() const;
  // Same values, cut from the tape.
  Tensor detach() const;

  using BackwardFn = std::function<void(detail::Node&)>;
  // Builds an op result. Tape links are kept only if a parent requires grad.
  static Tensor make_result(Shape shape, std::vector<double> value,
                            std::vector<Tensor> parents, BackwardFn backward);

  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;
};

}  // namespace streetnav::tensor
