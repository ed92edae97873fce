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
#include <algorithm>
#include <cstddef>
#include <cstdint>

#include "streetnav/common/error.hpp"
#include "streetnav/tensor/ops.hpp"

namespace streetnav::tensor {

namespace {

using detail::Node;

// All three kernels are phrased in terms of the forward convolution:
// input (cin,h,w) -> output (cout,oh,ow) with kernel (cout,cin,kh,kw).
struct ConvGeom {
  std::size_t cin, h, w, cout, kh, kw, stride, pad, oh, ow;
};

// Output indices o in [lo, hi) whose input index o*stride + k - pad lies in [0, in).
std::pair<std::size_t, std::size_t> valid_range(std::size_t k, std::size_t in, std::size_t out,
                                                 std::size_t stride, std::size_t pad) {
  const auto s = static_cast<std::int64_t>(stride);
  const std::int64_t shift = static_cast<std::int64_t>(k) - static_cast<std::int64_t>(pad);
  std::int64_t lo = shift >= 0 ? 0 : (-shift + s - 1) / s;
  std::int64_t last = static_cast<std::int64_t>(in) - 1 - shift;
  if (last < 0) return {0, 0};
  std::int64_t hi = std::min<std::int64_t>(static_cast<std::int64_t>(out), last / s + 1);
  if (hi <= lo) return {0, 0};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

// mode 0: out += conv(in, k); mode 1: in += conv^T(out, k); mode 2: k += in (*) out.
template <int Mode>
void conv_kernel(const ConvGeom& g, double* in, double* k, double* out) {
  for (std::size_t co = 0; co < g.cout; ++co) {
    for (std::size_t ci = 0; ci < g.cin; ++ci) {
      for (std::size_t ky = 0; ky < g.kh; ++ky) {
        auto [y_lo, y_hi] = valid_range(ky, g.h, g.oh, g.stride, g.pad);
        for (std::size_t kx = 0; kx < g.kw; ++kx) {
          auto [x_lo, x_hi] = valid_range(kx, g.w, g.ow, g.stride, g.pad);
          double* kv = k + ((co * g.cin + ci) * g.kh + ky) * g.kw + kx;
          double acc = 0.0;
          for (std::size_t oy = y_lo; oy < y_hi; ++oy) {
            const std::size_t iy = oy * g.stride + ky - g.pad;
            double* orow = out + (co * g.oh + oy) * g.ow;
            double* irow = in + (ci * g.h + iy) * g.w;
            const std::ptrdiff_t shift =
                static_cast<std::ptrdiff_t>(kx) - static_cast<std::ptrdiff_t>(g.pad);
            if (g.stride == 1) {
              if constexpr (Mode == 0) {
                const double wv = *kv;
                for (std::size_t ox = x_lo; ox < x_hi; ++ox) orow[ox] += wv * irow[static_cast<std::ptrdiff_t>(ox) + shift];
              } else if constexpr (Mode == 1) {
                const double wv = *kv;
                for (std::size_t ox = x_lo; ox < x_hi; ++ox) irow[static_cast<std::ptrdiff_t>(ox) + shift] += wv * orow[ox];
              } else {
                for (std::size_t ox = x_lo; ox < x_hi; ++ox) acc += irow[static_cast<std::ptrdiff_t>(ox) + shift] * orow[ox];
              }
            } else {
              for (std::size_t ox = x_lo; ox < x_hi; ++ox) {
                double& iv = irow[static_cast<std::ptrdiff_t>(ox * g.stride) + shift];
                if constexpr (Mode == 0) {
                  orow[ox] += *kv * iv;
                } else if constexpr (Mode == 1) {
                  iv += *kv * orow[ox];
                } else {
                  acc += iv * orow[ox];
                }
              }
            }
          }
          if constexpr (Mode == 2) *kv += acc;
        }
      }
    }
  }
}

void check_conv_args(const char* op, const Tensor& x, const Tensor& kernel, Conv2dOptions opt) {
  if (x.rank() != 3 || kernel.rank() != 4) {
    throw ShapeError(std::string(op) + ": expected input (C,H,W) and 4-d kernel, got " +
                     shape_str(x.shape()) + " and " + shape_str(kernel.shape()));
  }
  if (opt.stride == 0) throw ShapeError(std::string(op) + ": stride must be positive");
}

}  // namespace

std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride,
                             std::size_t padding) {
  const std::size_t padded = in + 2 * padding;
  if (kernel == 0 || kernel > padded || stride == 0) {
    throw ShapeError("conv: kernel " + std::to_string(kernel) + " does not fit padded extent " +
                     std::to_string(padded));
  }
  if ((padded - kernel) % stride != 0) {
    throw ShapeError("conv: non-integral output size (" + std::to_string(in) + " + 2*" +
                     std::to_string(padding) + " - " + std::to_string(kernel) + ") / " +
                     std::to_string(stride));
  }
  return (padded - kernel) / stride + 1;
}

Tensor conv2d(const Tensor& x, const Tensor& kernel, Conv2dOptions opt) {
  check_conv_args("conv2d", x, kernel, opt);
  if (kernel.dim(1) != x.dim(0)) {
    throw ShapeError("conv2d: kernel " + shape_str(kernel.shape()) + " expects " +
                     std::to_string(kernel.dim(1)) + " input channels, input is " +
                     shape_str(x.shape()));
  }
  ConvGeom g{x.dim(0),      x.dim(1),   x.dim(2),    kernel.dim(0), kernel.dim(2),
             kernel.dim(3), opt.stride, opt.padding, 0,             0};
  g.oh = conv_output_size(g.h, g.kh, g.stride, g.pad);
  g.ow = conv_output_size(g.w, g.kw, g.stride, g.pad);
  std::vector<double> out(g.cout * g.oh * g.ow, 0.0);
  conv_kernel<0>(g, const_cast<double*>(x.data().data()), const_cast<double*>(kernel.data().data()),
                 out.data());
  return Tensor::make_result({g.cout, g.oh, g.ow}, std::move(out), {x, kernel}, [g](Node& self) {
    Node& in = *self.parents[0];
    Node& k = *self.parents[1];
    if (in.requires_grad) conv_kernel<1>(g, in.grad_buffer().data(), k.value.data(), self.grad.data());
    if (k.requires_grad) conv_kernel<2>(g, in.value.data(), k.grad_buffer().data(), self.grad.data());
  });
}

Tensor deconv2d(const Tensor& x, const Tensor& kernel, Conv2dOptions opt) {
  check_conv_args("deconv2d", x, kernel, opt);
  if (kernel.dim(0) != x.dim(0)) {
    throw ShapeError("deconv2d: kernel " + shape_str(kernel.shape()) + " expects " +
                     std::to_string(kernel.dim(0)) + " input channels, input is " +
                     shape_str(x.shape()));
  }
  // The forward convolution this op is the adjoint of maps the deconv output
  // (cout,oh,ow) back to x.
  const std::size_t kh = kernel.dim(2), kw = kernel.dim(3);
  const auto extent = [&](std::size_t n, std::size_t k) -> std::size_t {
    const std::int64_t e = static_cast<std::int64_t>((n - 1) * opt.stride + k) -
                           2 * static_cast<std::int64_t>(opt.padding);
    if (n == 0 || e <= 0) {
      throw ShapeError("deconv2d: empty output for input " + shape_str(x.shape()) + " and kernel " +
                       shape_str(kernel.shape()));
    }
    return static_cast<std::size_t>(e);
  };
  ConvGeom g{kernel.dim(1), extent(x.dim(1), kh), extent(x.dim(2), kw), x.dim(0), kh, kw,
             opt.stride,    opt.padding,          x.dim(1),             x.dim(2)};
  std::vector<double> out(g.cin * g.h * g.w, 0.0);
  conv_kernel<1>(g, out.data(), const_cast<double*>(kernel.data().data()),
                 const_cast<double*>(x.data().data()));
  return Tensor::make_result({g.cin, g.h, g.w}, std::move(out), {x, kernel}, [g](Node& self) {
    Node& in = *self.parents[0];
    Node& k = *self.parents[1];
    if (in.requires_grad) conv_kernel<0>(g, self.grad.data(), k.value.data(), in.grad_buffer().data());
    if (k.requires_grad) conv_kernel<2>(g, self.grad.data(), k.grad_buffer().data(), in.value.data());
  });
}

}  // namespace streetnav::tensor
