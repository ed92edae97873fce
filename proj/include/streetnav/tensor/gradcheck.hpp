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
#include <span>
#include <string>
#include <vector>

#include "streetnav/tensor/param_store.hpp"
#include "streetnav/tensor/tensor.hpp"

namespace streetnav::tensor {

struct GradCheckReport {
  double max_error = 0.0;
  std::string worst_input;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// |a - n| / max(|a|, |n|, floor). Central differences at eps = 1e-5 carry
// absolute noise near 1e-11 for O(1) losses, so gradients far below the
// floor (including ones that are exactly zero by symmetry) are compared in
// absolute terms rather than amplified into spurious relative errors.
inline constexpr double kGradCheckFloor = 1e-6;
double relative_error(double analytic, double numeric, double floor = kGradCheckFloor);

// Compares tape gradients of the scalar f() with central differences
// (f(x + eps e_i) - f(x - eps e_i)) / 2eps for every element of every input.
// `f` must rebuild its graph from the current contents of the inputs, which
// are perturbed in place and restored afterwards.
GradCheckReport finite_diff_check(const std::function<Tensor()>& f, std::span<Tensor> inputs,
                                  double eps = 1e-5);

// Same, over every parameter leaf in `params`.
GradCheckReport finite_diff_check(const std::function<Tensor(const Bindings&)>& f,
                                  Bindings& params, double eps = 1e-5);

// For a loss that is a sum of scalar terms. Each term is differenced before
// summing, so rounding noise scales with the terms rather than the total;
// this matters for small gradients of long multi-step losses.
GradCheckReport finite_diff_check_terms(const std::function<std::vector<Tensor>(const Bindings&)>& terms,
                                        Bindings& params, double eps = 1e-5);

namespace detail {
void observe_relu_input(std::span<const double> values);
}  // namespace detail

// Finite differences are only meaningful where the loss is smooth within
// eps of the inputs. While a KinkProbe is alive, relu() on this thread
// records the smallest |input| it sees, i.e. the distance to its kink.
class KinkProbe {
 public:
  KinkProbe();
  ~KinkProbe();
  KinkProbe(const KinkProbe&) = delete;
  KinkProbe& operator=(const KinkProbe&) = delete;

  double margin() const { return margin_; }

 private:
  friend void detail::observe_relu_input(std::span<const double> values);
  double margin_;
  KinkProbe* outer_;
};

}  // namespace streetnav::tensor
