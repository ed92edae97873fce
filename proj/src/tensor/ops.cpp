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
#include "streetnav/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "streetnav/common/error.hpp"
#include "streetnav/tensor/gradcheck.hpp"

namespace streetnav::tensor {

namespace {

using detail::Node;

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
}

void require_rank(const char* op, const Tensor& x, std::size_t rank) {
  if (x.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_str(x.shape()));
  }
}

// Applies `f(parent_grad, parent_value)` to every parent that needs a gradient.
template <typename F>
void for_grad_parent(Node& self, std::size_t i, F&& f) {
  Node& p = *self.parents[i];
  if (p.requires_grad) f(p.grad_buffer(), p.value);
}

template <typename Fwd, typename Bwd>
Tensor unary(const Tensor& x, Fwd fwd, Bwd bwd) {
  auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  return Tensor::make_result(x.shape(), std::move(out), {x}, [bwd](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>& xv) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * bwd(xv[i], self.value[i]);
    });
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.data().begin(), a.data().end());
  auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      for_grad_parent(self, k, [&](std::vector<double>& g, const std::vector<double>&) {
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
      });
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<double> out(a.data().begin(), a.data().end());
  auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      const double sign = k == 0 ? 1.0 : -1.0;
      for_grad_parent(self, k, [&](std::vector<double>& g, const std::vector<double>&) {
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign * self.grad[i];
      });
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    const auto& x0 = self.parents[0]->value;
    const auto& x1 = self.parents[1]->value;
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x1[i];
    });
    for_grad_parent(self, 1, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x0[i];
    });
  });
}

Tensor scale(const Tensor& a, double s) {
  return unary(a, [s](double v) { return v * s; }, [s](double, double) { return s; });
}

Tensor relu(const Tensor& x) {
  detail::observe_relu_input(x.data());
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double in, double) { return in > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
  return unary(
      x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return Tensor::make_result({}, {total}, {x}, [](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (double& v : g) v += self.grad[0];
    });
  });
}

Tensor mean_of(std::span<const Tensor> xs) {
  if (xs.empty()) throw ShapeError("mean_of: no inputs");
  Tensor acc = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) acc = add(acc, xs[i]);
  return scale(acc, 1.0 / static_cast<double>(xs.size()));
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_rank("linear(weight)", w, 2);
  require_rank("linear(input)", x, 1);
  const std::size_t out_dim = w.dim(0), in_dim = w.dim(1);
  if (x.dim(0) != in_dim) {
    throw ShapeError("linear: weight " + shape_str(w.shape()) + " vs input " + shape_str(x.shape()));
  }
  const bool has_bias = b.defined();
  if (has_bias && (b.rank() != 1 || b.dim(0) != out_dim)) {
    throw ShapeError("linear: bias " + shape_str(b.shape()) + " vs weight " + shape_str(w.shape()));
  }
  auto xv = x.data();
  auto wv = w.data();
  std::vector<double> out(out_dim, 0.0);
  for (std::size_t o = 0; o < out_dim; ++o) {
    const double* row = wv.data() + o * in_dim;
    double acc = has_bias ? b.data()[o] : 0.0;
    for (std::size_t i = 0; i < in_dim; ++i) acc += row[i] * xv[i];
    out[o] = acc;
  }
  std::vector<Tensor> parents{x, w};
  if (has_bias) parents.push_back(b);
  return Tensor::make_result({out_dim}, std::move(out), std::move(parents),
                             [out_dim, in_dim, has_bias](Node& self) {
    const auto& xv = self.parents[0]->value;
    const auto& wv = self.parents[1]->value;
    const auto& g = self.grad;
    for_grad_parent(self, 0, [&](std::vector<double>& gx, const std::vector<double>&) {
      for (std::size_t o = 0; o < out_dim; ++o) {
        const double* row = wv.data() + o * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) gx[i] += row[i] * g[o];
      }
    });
    for_grad_parent(self, 1, [&](std::vector<double>& gw, const std::vector<double>&) {
      for (std::size_t o = 0; o < out_dim; ++o) {
        double* row = gw.data() + o * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) row[i] += g[o] * xv[i];
      }
    });
    if (has_bias) {
      for_grad_parent(self, 2, [&](std::vector<double>& gb, const std::vector<double>&) {
        for (std::size_t o = 0; o < out_dim; ++o) gb[o] += g[o];
      });
    }
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  auto av = a.data();
  auto bv = b.data();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return Tensor::make_result({m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    const auto& av = self.parents[0]->value;
    const auto& bv = self.parents[1]->value;
    const auto& g = self.grad;
    for_grad_parent(self, 0, [&](std::vector<double>& ga, const std::vector<double>&) {
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = bv.data() + p * n;
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
          ga[i * k + p] += acc;
        }
      }
    });
    for_grad_parent(self, 1, [&](std::vector<double>& gb, const std::vector<double>&) {
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = g.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = av[i * k + p];
          double* gbrow = gb.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) gbrow[j] += aip * grow[j];
        }
      }
    });
  });
}

Tensor add_bias(const Tensor& x, const Tensor& b) {
  require_rank("add_bias(bias)", b, 1);
  if (x.rank() < 1 || x.dim(0) != b.dim(0)) {
    throw ShapeError("add_bias: input " + shape_str(x.shape()) + " vs bias " + shape_str(b.shape()));
  }
  const std::size_t channels = b.dim(0);
  const std::size_t inner = x.numel() / channels;
  std::vector<double> out(x.data().begin(), x.data().end());
  auto bv = b.data();
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < inner; ++i) out[c * inner + i] += bv[c];
  }
  return Tensor::make_result(x.shape(), std::move(out), {x, b}, [channels, inner](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& gx, const std::vector<double>&) {
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += self.grad[i];
    });
    for_grad_parent(self, 1, [&](std::vector<double>& gb, const std::vector<double>&) {
      for (std::size_t c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < inner; ++i) acc += self.grad[c * inner + i];
        gb[c] += acc;
      }
    });
  });
}

Tensor concat(std::span<const Tensor> xs) {
  if (xs.empty()) throw ShapeError("concat: no inputs");
  Shape tail(xs[0].shape().begin() + (xs[0].rank() ? 1 : 0), xs[0].shape().end());
  if (xs[0].rank() == 0) throw ShapeError("concat: scalar input");
  std::size_t total = 0;
  std::vector<std::size_t> sizes;
  for (const Tensor& t : xs) {
    Shape t_tail(t.shape().begin() + 1, t.shape().end());
    if (t.rank() == 0 || t_tail != tail) {
      throw ShapeError("concat: " + shape_str(t.shape()) + " incompatible with " +
                       shape_str(xs[0].shape()));
    }
    total += t.dim(0);
    sizes.push_back(t.numel());
  }
  Shape shape = xs[0].shape();
  shape[0] = total;
  std::vector<double> out;
  out.reserve(numel(shape));
  for (const Tensor& t : xs) out.insert(out.end(), t.data().begin(), t.data().end());
  return Tensor::make_result(std::move(shape), std::move(out),
                             std::vector<Tensor>(xs.begin(), xs.end()), [sizes](Node& self) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      for_grad_parent(self, k, [&](std::vector<double>& g, const std::vector<double>&) {
        for (std::size_t i = 0; i < sizes[k]; ++i) g[i] += self.grad[offset + i];
      });
      offset += sizes[k];
    }
  });
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  const Tensor both[] = {a, b};
  return concat(both);
}

Tensor slice(const Tensor& x, std::size_t start, std::size_t length) {
  if (x.rank() == 0 || start + length > x.dim(0) || length == 0) {
    throw ShapeError("slice: [" + std::to_string(start) + ", +" + std::to_string(length) +
                     ") out of range for " + shape_str(x.shape()));
  }
  const std::size_t inner = x.numel() / x.dim(0);
  Shape shape = x.shape();
  shape[0] = length;
  auto xv = x.data();
  std::vector<double> out(xv.begin() + start * inner, xv.begin() + (start + length) * inner);
  const std::size_t offset = start * inner;
  return Tensor::make_result(std::move(shape), std::move(out), {x}, [offset](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[offset + i] += self.grad[i];
    });
  });
}

std::vector<Tensor> split(const Tensor& x, std::size_t parts) {
  if (parts == 0 || x.rank() == 0 || x.dim(0) % parts != 0) {
    throw ShapeError("split: cannot split " + shape_str(x.shape()) + " into " +
                     std::to_string(parts) + " equal parts");
  }
  const std::size_t len = x.dim(0) / parts;
  std::vector<Tensor> out;
  for (std::size_t k = 0; k < parts; ++k) out.push_back(slice(x, k * len, len));
  return out;
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.numel()) {
    throw ShapeError("reshape: " + shape_str(x.shape()) + " -> " + shape_str(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return Tensor::make_result(std::move(shape), std::move(out), {x}, [](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    });
  });
}

Tensor embedding(const Tensor& table, std::size_t id) {
  require_rank("embedding", table, 2);
  const std::size_t rows = table.dim(0), d = table.dim(1);
  if (id >= rows) {
    throw PreconditionError("embedding: id " + std::to_string(id) + " >= vocabulary size " +
                            std::to_string(rows));
  }
  auto tv = table.data();
  std::vector<double> out(tv.begin() + id * d, tv.begin() + (id + 1) * d);
  return Tensor::make_result({d}, std::move(out), {table}, [id, d](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < d; ++i) g[id * d + i] += self.grad[i];
    });
  });
}

Tensor broadcast_pixels(const Tensor& v, std::size_t height, std::size_t width) {
  require_rank("broadcast_pixels", v, 1);
  const std::size_t d = v.dim(0), plane = height * width;
  std::vector<double> out(d * plane);
  auto vv = v.data();
  for (std::size_t c = 0; c < d; ++c) std::fill_n(out.begin() + c * plane, plane, vv[c]);
  return Tensor::make_result({d, height, width}, std::move(out), {v}, [d, plane](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t c = 0; c < d; ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < plane; ++i) acc += self.grad[c * plane + i];
        g[c] += acc;
      }
    });
  });
}

Tensor dropout(const Tensor& x, double p, Rng* rng) {
  if (p < 0.0 || p >= 1.0) throw PreconditionError("dropout: p must be in [0,1)");
  if (rng == nullptr || p == 0.0) return x;
  std::bernoulli_distribution keep(1.0 - p);
  const double s = 1.0 / (1.0 - p);
  std::vector<double> mask(x.numel());
  for (double& m : mask) m = keep(*rng) ? s : 0.0;
  auto xv = x.data();
  std::vector<double> out(mask.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * mask[i];
  return Tensor::make_result(x.shape(), std::move(out), {x}, [mask = std::move(mask)](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mask[i];
    });
  });
}

namespace {

double max_checked(const char* op, std::span<const double> v) {
  if (v.empty()) throw ShapeError(std::string(op) + ": empty input");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) {
    if (std::isnan(x)) throw NumericError(std::string(op) + ": NaN input");
    m = std::max(m, x);
  }
  if (!std::isfinite(m)) throw NumericError(std::string(op) + ": non-finite input");
  return m;
}

}  // namespace

Tensor softmax(const Tensor& x) {
  auto xv = x.data();
  const double m = max_checked("softmax", xv);
  std::vector<double> out(xv.size());
  double z = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) z += out[i] = std::exp(xv[i] - m);
  for (double& v : out) v /= z;
  return Tensor::make_result(x.shape(), std::move(out), {x}, [](Node& self) {
    const auto& y = self.value;
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += self.grad[i] * y[i];
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += y[i] * (self.grad[i] - dot);
    });
  });
}

Tensor log_softmax(const Tensor& x) {
  auto xv = x.data();
  const double m = max_checked("log_softmax", xv);
  double z = 0.0;
  for (double v : xv) z += std::exp(v - m);
  const double lse = m + std::log(z);
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] - lse;
  return Tensor::make_result(x.shape(), std::move(out), {x}, [](Node& self) {
    double gsum = 0.0;
    for (double g : self.grad) gsum += g;
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += self.grad[i] - std::exp(self.value[i]) * gsum;
      }
    });
  });
}

Tensor kl_divergence(const Tensor& target, const Tensor& predicted) {
  if (target.numel() != predicted.numel()) {
    throw ShapeError("kl_divergence: target " + shape_str(target.shape()) + " vs predicted " +
                     shape_str(predicted.shape()));
  }
  auto t = target.data();
  auto p = predicted.data();
  double loss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= 0.0) continue;
    if (p[i] <= 0.0) {
      throw NumericError("kl_divergence: predicted probability 0 where target is positive");
    }
    loss += t[i] * std::log(t[i] / p[i]);
  }
  std::vector<double> tv(t.begin(), t.end());
  return Tensor::make_result({}, {loss}, {predicted}, [tv = std::move(tv)](Node& self) {
    const auto& pv = self.parents[0]->value;
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (tv[i] > 0.0) g[i] -= self.grad[0] * tv[i] / pv[i];
      }
    });
  });
}

Tensor kl_divergence_logits(const Tensor& target, const Tensor& logits) {
  if (target.numel() != logits.numel()) {
    throw ShapeError("kl_divergence_logits: target " + shape_str(target.shape()) + " vs logits " +
                     shape_str(logits.shape()));
  }
  Tensor logp = log_softmax(logits);
  auto t = target.data();
  auto lp = logp.data();
  double loss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0) loss += t[i] * (std::log(t[i]) - lp[i]);
  }
  std::vector<double> tv(t.begin(), t.end());
  return Tensor::make_result({}, {loss}, {logp}, [tv = std::move(tv)](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[0] * tv[i];
    });
  });
}

Tensor pick(const Tensor& x, std::size_t i) {
  if (i >= x.numel()) {
    throw ShapeError("pick: index " + std::to_string(i) + " out of range for " + shape_str(x.shape()));
  }
  return Tensor::make_result({}, {x.data()[i]}, {x}, [i](Node& self) {
    for_grad_parent(self, 0, [&](std::vector<double>& g, const std::vector<double>&) {
      g[i] += self.grad[0];
    });
  });
}

}  // namespace streetnav::tensor
