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
#include "streetnav/tensor/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "streetnav/common/error.hpp"
#include "streetnav/tensor/ops.hpp"

namespace streetnav::tensor {

namespace {

struct Target {
  std::string name;
  Tensor leaf;
};

using Terms = std::function<std::vector<Tensor>()>;

Tensor total(const std::vector<Tensor>& terms) {
  if (terms.empty()) throw PreconditionError("gradient check: loss has no terms");
  Tensor sum = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) sum = add(sum, terms[i]);
  return sum;
}

// Sum over terms of f_i(x + eps) - f_i(x - eps).
double difference(const std::vector<Tensor>& plus, const std::vector<Tensor>& minus) {
  if (plus.size() != minus.size()) throw PreconditionError("gradient check: term count changed under perturbation");
  double d = 0.0;
  for (std::size_t i = 0; i < plus.size(); ++i) d += plus[i].item() - minus[i].item();
  return d;
}

GradCheckReport check(const Terms& f, std::vector<Target>& targets, double eps) {
  for (auto& t : targets) t.leaf.zero_grad();
  total(f()).backward();
  std::vector<std::vector<double>> analytic;
  for (auto& t : targets) {
    auto g = t.leaf.grad();
    analytic.emplace_back(t.leaf.numel(), 0.0);
    std::copy(g.begin(), g.end(), analytic.back().begin());
  }
  GradCheckReport report;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    auto values = targets[k].leaf.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const auto plus = f();
      values[i] = saved - eps;
      const auto minus = f();
      values[i] = saved;
      const double numeric = difference(plus, minus) / (2.0 * eps);
      const double err = relative_error(analytic[k][i], numeric);
      ++report.checked;
      if (err > report.max_error || report.checked == 1) {
        report.max_error = std::max(report.max_error, err);
        report.worst_input = targets[k].name;
        report.worst_index = i;
        report.worst_analytic = analytic[k][i];
        report.worst_numeric = numeric;
      }
    }
  }
  for (auto& t : targets) t.leaf.zero_grad();
  return report;
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport finite_diff_check(const std::function<Tensor()>& f, std::span<Tensor> inputs,
                                  double eps) {
  std::vector<Target> targets;
  for (std::size_t i = 0; i < inputs.size(); ++i) targets.push_back({"input" + std::to_string(i), inputs[i]});
  return check([&] { return std::vector<Tensor>{f()}; }, targets, eps);
}

GradCheckReport finite_diff_check(const std::function<Tensor(const Bindings&)>& f,
                                  Bindings& params, double eps) {
  std::vector<Target> targets;
  for (auto& [name, leaf] : params) targets.push_back({name, leaf});
  return check([&] { return std::vector<Tensor>{f(params)}; }, targets, eps);
}

GradCheckReport finite_diff_check_terms(const std::function<std::vector<Tensor>(const Bindings&)>& terms,
                                        Bindings& params, double eps) {
  std::vector<Target> targets;
  for (auto& [name, leaf] : params) targets.push_back({name, leaf});
  return check([&] { return terms(params); }, targets, eps);
}

namespace {
thread_local KinkProbe* active_probe = nullptr;
}  // namespace

KinkProbe::KinkProbe() : margin_(std::numeric_limits<double>::infinity()), outer_(active_probe) {
  active_probe = this;
}

KinkProbe::~KinkProbe() { active_probe = outer_; }

namespace detail {

void observe_relu_input(std::span<const double> values) {
  for (KinkProbe* p = active_probe; p != nullptr; p = p->outer_) {
    for (double v : values) p->margin_ = std::min(p->margin_, std::abs(v));
  }
}

}  // namespace detail

}  // namespace streetnav::tensor
