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
#include "streetnav/tensor/param_store.hpp"

#include <atomic>
#include <cmath>
#include <fstream>

#include "streetnav/common/binary_io.hpp"
#include "streetnav/common/error.hpp"

namespace streetnav::tensor {

namespace {

double load_relaxed(const double& x) {
  return std::atomic_ref<double>(const_cast<double&>(x)).load(std::memory_order_relaxed);
}

void store_relaxed(double& x, double v) {
  std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
}

constexpr std::uint32_t kMaxNameLength = 4096;
constexpr std::uint32_t kMaxRank = 8;

}  // namespace

const Tensor& Bindings::operator[](std::string_view name) const {
  auto it = leaves_.find(name);
  if (it == leaves_.end()) throw LookupError("no parameter named '" + std::string(name) + "'");
  return it->second;
}

void Bindings::zero_grad() {
  for (auto& [name, t] : leaves_) t.zero_grad();
}

void ParamStore::add(const std::string& name, Shape shape, Rng& rng, double init_scale) {
  std::uniform_real_distribution<double> dist(-init_scale, init_scale);
  std::vector<double> values(numel(shape));
  for (double& v : values) v = dist(rng);
  add_value(name, std::move(shape), std::move(values));
}

void ParamStore::add_value(const std::string& name, Shape shape, std::vector<double> values) {
  if (name.empty()) throw PreconditionError("parameter name must be non-empty");
  if (contains(name)) throw PreconditionError("duplicate parameter '" + name + "'");
  if (values.size() != numel(shape)) {
    throw ShapeError("parameter '" + name + "': " + std::to_string(values.size()) +
                     " values for shape " + shape_str(shape));
  }
  Param p;
  p.m.assign(values.size(), 0.0);
  p.v.assign(values.size(), 0.0);
  p.shape = std::move(shape);
  p.value = std::move(values);
  params_.emplace(name, std::move(p));
}

const ParamStore::Param& ParamStore::get(std::string_view name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw LookupError("no parameter named '" + std::string(name) + "'");
  return it->second;
}

const Shape& ParamStore::shape(std::string_view name) const { return get(name).shape; }

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  for (const auto& [name, p] : params_) out.push_back(name);
  return out;
}

std::size_t ParamStore::num_values() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

std::span<const double> ParamStore::value(std::string_view name) const { return get(name).value; }

std::span<double> ParamStore::mutable_value(std::string_view name) {
  return const_cast<Param&>(get(name)).value;
}

std::int64_t ParamStore::steps() const {
  return std::atomic_ref<std::int64_t>(const_cast<std::int64_t&>(step_)).load(std::memory_order_relaxed);
}

Bindings ParamStore::bind() const {
  Bindings b;
  for (const auto& [name, p] : params_) {
    std::vector<double> values(p.value.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = load_relaxed(p.value[i]);
    b.leaves_.emplace(name, Tensor::from(p.shape, std::move(values), true));
  }
  return b;
}

void ParamStore::pull(Bindings& bindings) const {
  for (auto& [name, leaf] : bindings.leaves_) {
    const Param& p = get(name);
    auto dst = leaf.mutable_data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = load_relaxed(p.value[i]);
    leaf.zero_grad();
  }
}

void ParamStore::adam_step(const Bindings& grads, const AdamConfig& config) {
  const std::int64_t t =
      std::atomic_ref<std::int64_t>(step_).fetch_add(1, std::memory_order_relaxed) + 1;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  for (auto& [name, p] : params_) {
    auto it = grads.leaves_.find(name);
    std::span<const double> g;
    if (it != grads.leaves_.end()) {
      if (it->second.numel() != p.value.size()) {
        throw ShapeError("adam_step: gradient for '" + name + "' has shape " +
                         shape_str(it->second.shape()) + ", parameter " + shape_str(p.shape));
      }
      g = it->second.grad();
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double gi = g.empty() ? 0.0 : g[i];
      const double m = config.beta1 * load_relaxed(p.m[i]) + (1.0 - config.beta1) * gi;
      const double v = config.beta2 * load_relaxed(p.v[i]) + (1.0 - config.beta2) * gi * gi;
      store_relaxed(p.m[i], m);
      store_relaxed(p.v[i], v);
      const double update = config.lr * (m / c1) / (std::sqrt(v / c2) + config.eps);
      store_relaxed(p.value[i], load_relaxed(p.value[i]) - update);
    }
  }
}

void ParamStore::save(std::ostream& out) const {
  out.write("TDCK", 4);
  for (const auto& [name, p] : params_) {
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.shape.size()));
    for (std::size_t d : p.shape) io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (const double& v : p.value) io::write_le<double>(out, load_relaxed(v));
  }
}

ParamStore ParamStore::load(std::istream& in, const std::string& source) {
  io::expect_magic(in, "TDCK", source);
  ParamStore store;
  while (in.peek() != std::char_traits<char>::eof()) {
    auto len = io::read_le<std::uint32_t>(in, source, "name length");
    if (len == 0 || len > kMaxNameLength) throw ParseError(source, 0, "bad parameter name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw ParseError(source, 0, "truncated parameter name");
    auto rank = io::read_le<std::uint32_t>(in, source, "rank");
    if (rank > kMaxRank) throw ParseError(source, 0, "parameter '" + name + "' has rank > 8");
    Shape shape;
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      auto d = io::read_le<std::uint32_t>(in, source, "dimension");
      shape.push_back(d);
      count *= d;
      if (count > (std::uint64_t{1} << 32)) throw ParseError(source, 0, "parameter too large");
    }
    std::vector<double> values(count);
    for (double& v : values) v = io::read_le<double>(in, source, "parameter values");
    if (store.contains(name)) throw ParseError(source, 0, "duplicate parameter '" + name + "'");
    store.add_value(name, std::move(shape), std::move(values));
  }
  return store;
}

void ParamStore::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + file.string());
  save(out);
}

ParamStore ParamStore::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError(file.string(), 0, "cannot open file");
  return load(in, file.string());
}

}  // namespace streetnav::tensor
