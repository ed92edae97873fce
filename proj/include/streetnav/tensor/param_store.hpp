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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streetnav/common/rng.hpp"
#include "streetnav/tensor/tensor.hpp"

namespace streetnav::tensor {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Gradient-tracking leaf copies of a ParamStore's parameters for one
// forward/backward pass.
class Bindings {
 public:
  const Tensor& operator[](std::string_view name) const;
  bool contains(std::string_view name) const { return leaves_.find(name) != leaves_.end(); }
  std::size_t size() const { return leaves_.size(); }
  auto begin() const { return leaves_.begin(); }
  auto end() const { return leaves_.end(); }
  auto begin() { return leaves_.begin(); }
  auto end() { return leaves_.end(); }
  void zero_grad();

 private:
  friend class ParamStore;
  std::map<std::string, Tensor, std::less<>> leaves_;
};

// Named parameters with Adam moments.
//
// Hogwild contract: bind()/pull() and adam_step() may be called concurrently
// from several trainer threads without locks. Every element access goes
// through a relaxed std::atomic_ref, so racing updates may be lost or
// interleaved but never tear a value or touch freed memory. The set of
// parameters must not change while trainers run.
class ParamStore {
 public:
  // Uniform initialization on [-init_scale, init_scale].
  void add(const std::string& name, Shape shape, Rng& rng, double init_scale = 0.1);
  void add_value(const std::string& name, Shape shape, std::vector<double> values);

  bool contains(std::string_view name) const { return params_.find(name) != params_.end(); }
  const Shape& shape(std::string_view name) const;
  std::vector<std::string> names() const;
  std::size_t num_values() const;
  std::span<const double> value(std::string_view name) const;
  std::span<double> mutable_value(std::string_view name);
  std::int64_t steps() const;

  Bindings bind() const;
  // Refreshes the values of existing bindings in place and clears gradients.
  void pull(Bindings& bindings) const;
  // One Adam step from the gradients accumulated in `grads`. Parameters with
  // no gradient (unused in the pass) are treated as having zero gradient.
  void adam_step(const Bindings& grads, const AdamConfig& config);

  // Checkpoint: magic "TDCK", then per parameter (in name order)
  // u32 name length, name bytes, u32 rank, u32 dims..., float64 values;
  // all little-endian.
  void save(std::ostream& out) const;
  static ParamStore load(std::istream& in, const std::string& source = "checkpoint");
  void save(const std::filesystem::path& file) const;
  static ParamStore load(const std::filesystem::path& file);

 private:
  struct Param {
    Shape shape;
    std::vector<double> value;
    std::vector<double> m;
    std::vector<double> v;
  };
  const Param& get(std::string_view name) const;

  std::map<std::string, Param, std::less<>> params_;
  std::int64_t step_ = 0;  // accessed atomically
};

}  // namespace streetnav::tensor
