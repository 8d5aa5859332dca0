// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "autodiff.hpp"
#include "random.hpp"

#include <string>

namespace ddgan {

enum class Mode
{
  train,
  eval
};

namespace detail {

template <typename Scalar> using RowMatrix = typename Tensor<Scalar>::RowMatrix;

struct Window
{
  Index channels, height, width; // image the window slides over
  Index kh, kw, stride, pad;
  Index out_h, out_w; // number of window positions
};

inline Index conv_out_extent(Index in, Index k, Index stride, Index pad)
{
  return (in + 2 * pad - k) / stride + 1;
}

/// Unfolds sliding windows into columns: row (c, i, j), column (oh, ow).
template <typename Scalar> RowMatrix<Scalar> im2col(Scalar const *x, Window const &w)
{
  RowMatrix<Scalar> cols(w.channels * w.kh * w.kw, w.out_h * w.out_w);
  for (Index c = 0; c < w.channels; ++c) {
    for (Index i = 0; i < w.kh; ++i) {
      for (Index j = 0; j < w.kw; ++j) {
        Scalar *row = cols.row((c * w.kh + i) * w.kw + j).data();
        for (Index oh = 0; oh < w.out_h; ++oh) {
          Index const ih = oh * w.stride - w.pad + i;
          for (Index ow = 0; ow < w.out_w; ++ow) {
            Index const iw = ow * w.stride - w.pad + j;
            bool const inside = ih >= 0 && ih < w.height && iw >= 0 && iw < w.width;
            row[oh * w.out_w + ow] = inside ? x[(c * w.height + ih) * w.width + iw] : Scalar(0);
          }
        }
      }
    }
  }
  return cols;
}

/// Adjoint of im2col: scatters columns back, summing overlaps, into `x`.
template <typename Scalar> void col2im(RowMatrix<Scalar> const &cols, Window const &w, Scalar *x)
{
  for (Index c = 0; c < w.channels; ++c) {
    for (Index i = 0; i < w.kh; ++i) {
      for (Index j = 0; j < w.kw; ++j) {
        Scalar const *row = cols.row((c * w.kh + i) * w.kw + j).data();
        for (Index oh = 0; oh < w.out_h; ++oh) {
          Index const ih = oh * w.stride - w.pad + i;
          if (ih < 0 || ih >= w.height) continue;
          for (Index ow = 0; ow < w.out_w; ++ow) {
            Index const iw = ow * w.stride - w.pad + j;
            if (iw < 0 || iw >= w.width) continue;
            x[(c * w.height + ih) * w.width + iw] += row[oh * w.out_w + ow];
          }
        }
      }
    }
  }
}

inline void check_conv_args(char const *op, Shape const &x, Shape const &k, Index stride, Index pad,
                            Index kernel_in_axis)
{
  auto fail = [&](std::string const &why) {
    throw ShapeError(std::string(op) + ": " + why + " (input " + to_string(x) + ", kernels " + to_string(k) + ")");
  };
  if (x.size() != 3) fail("input must be [C,H,W]");
  if (k.size() != 4) fail("kernels must be rank 4");
  if (k[kernel_in_axis] != x[0]) {
    fail("kernel expects " + std::to_string(k[kernel_in_axis]) + " input channels, input has " +
         std::to_string(x[0]));
  }
  if (stride < 1) fail("stride must be >= 1");
  if (pad < 0) fail("padding must be >= 0");
}

} // namespace detail

/// Cross-correlation. input [C_in,H,W], kernels [C_out,C_in,kh,kw].
template <typename Scalar>
Var<Scalar> conv2d(Var<Scalar> const &input, Var<Scalar> const &kernels, Index stride = 1, Index padding = 0)
{
  auto const &xs = input.shape();
  auto const &ks = kernels.shape();
  detail::check_conv_args("conv2d", xs, ks, stride, padding, 1);
  if (ks[2] > xs[1] + 2 * padding || ks[3] > xs[2] + 2 * padding) {
    throw ShapeError("conv2d: kernel " + to_string(ks) + " larger than padded input " + to_string(xs) +
                     " with padding " + std::to_string(padding));
  }
  detail::Window const win{xs[0],
                           xs[1],
                           xs[2],
                           ks[2],
                           ks[3],
                           stride,
                           padding,
                           detail::conv_out_extent(xs[1], ks[2], stride, padding),
                           detail::conv_out_extent(xs[2], ks[3], stride, padding)};
  auto cols = detail::im2col(input.value().raw(), win);
  Index const cout = ks[0];
  Tensor<Scalar> out(Shape{cout, win.out_h, win.out_w});
  out.matrix().noalias() = kernels.value().matrix() * cols;

  return make_op<Scalar>("conv2d", std::move(out), {input, kernels},
                         [win, cols = std::move(cols)](Node<Scalar> &n) {
                           auto &x = *n.inputs[0];
                           auto &k = *n.inputs[1];
                           auto const dy = n.grad.matrix();
                           if (k.requires_grad) k.grad_buffer().matrix().noalias() += dy * cols.transpose();
                           if (x.requires_grad) {
                             detail::RowMatrix<Scalar> dcols = k.value.matrix().transpose() * dy;
                             detail::col2im(dcols, win, x.grad_buffer().raw());
                           }
                         });
}

/// Adjoint of conv2d with respect to its input. input [C_in,H,W], kernels
/// [C_in,C_out,kh,kw] (the same layout conv2d uses for a C_out -> C_in map).
template <typename Scalar>
Var<Scalar> conv2d_transposed(Var<Scalar> const &input, Var<Scalar> const &kernels, Index stride = 1,
                              Index padding = 0)
{
  auto const &xs = input.shape();
  auto const &ks = kernels.shape();
  detail::check_conv_args("conv2d_transposed", xs, ks, stride, padding, 0);
  Index const out_h = (xs[1] - 1) * stride - 2 * padding + ks[2];
  Index const out_w = (xs[2] - 1) * stride - 2 * padding + ks[3];
  if (out_h < 1 || out_w < 1) {
    throw ShapeError("conv2d_transposed: padding " + std::to_string(padding) + " leaves no output for input " +
                     to_string(xs) + " and kernels " + to_string(ks));
  }
  Index const cout = ks[1];
  detail::Window const win{cout, out_h, out_w, ks[2], ks[3], stride, padding, xs[1], xs[2]};
  auto const kmat = kernels.value().matrix(); // C_in x (C_out*kh*kw)
  auto const xmat = input.value().matrix();   // C_in x (H*W)
  detail::RowMatrix<Scalar> cols = kmat.transpose() * xmat;
  Tensor<Scalar> out(Shape{cout, out_h, out_w});
  detail::col2im(cols, win, out.raw());

  return make_op<Scalar>("conv2d_transposed", std::move(out), {input, kernels}, [win](Node<Scalar> &n) {
    auto &x = *n.inputs[0];
    auto &k = *n.inputs[1];
    detail::RowMatrix<Scalar> dcols = detail::im2col(n.grad.raw(), win);
    if (x.requires_grad) x.grad_buffer().matrix().noalias() += k.value.matrix() * dcols;
    if (k.requires_grad) k.grad_buffer().matrix().noalias() += x.value.matrix() * dcols.transpose();
  });
}

/// Adds one bias per channel to a [C,H,W] tensor.
template <typename Scalar> Var<Scalar> add_bias(Var<Scalar> const &input, Var<Scalar> const &bias)
{
  auto const &xs = input.shape();
  if (xs.size() != 3 || bias.shape() != Shape{xs[0]}) {
    throw ShapeError("add_bias: input " + to_string(xs) + " incompatible with bias " + to_string(bias.shape()));
  }
  Tensor<Scalar> out = input.value();
  out.matrix().colwise() += bias.value().data().matrix();
  return make_op<Scalar>("add_bias", std::move(out), {input, bias}, [](Node<Scalar> &n) {
    if (n.inputs[0]->requires_grad) n.inputs[0]->grad_buffer().data() += n.grad.data();
    if (n.inputs[1]->requires_grad) n.inputs[1]->grad_buffer().data() += n.grad.matrix().rowwise().sum().array();
  });
}

/// 2x2 non-overlapping max pooling. Odd extents are zero-padded on the
/// right/bottom first. Gradient goes to the first maximal element of each
/// window in row-major order.
template <typename Scalar> Var<Scalar> maxpool2(Var<Scalar> const &input)
{
  auto const &xs = input.shape();
  if (xs.size() != 3) throw ShapeError("maxpool2: input must be [C,H,W], got " + to_string(xs));
  Index const c = xs[0], h = xs[1], w = xs[2];
  Index const oh = (h + 1) / 2, ow = (w + 1) / 2;
  Tensor<Scalar> out(Shape{c, oh, ow});
  std::vector<Index> argmax(static_cast<std::size_t>(out.size()), -1); // -1: winner was padding
  auto const &x = input.value();
  for (Index ch = 0; ch < c; ++ch) {
    for (Index i = 0; i < oh; ++i) {
      for (Index j = 0; j < ow; ++j) {
        Scalar best = 0;
        Index best_at = -1;
        bool first = true;
        for (Index di = 0; di < 2; ++di) {
          for (Index dj = 0; dj < 2; ++dj) {
            Index const r = 2 * i + di, q = 2 * j + dj;
            bool const inside = r < h && q < w;
            Scalar const v = inside ? x.at(ch, r, q) : Scalar(0);
            if (first || v > best) {
              best = v;
              best_at = inside ? (ch * h + r) * w + q : -1;
              first = false;
            }
          }
        }
        Index const o = (ch * oh + i) * ow + j;
        out[o] = best;
        argmax[static_cast<std::size_t>(o)] = best_at;
      }
    }
  }
  return make_op<Scalar>("maxpool2", std::move(out), {input}, [argmax = std::move(argmax)](Node<Scalar> &n) {
    auto &g = n.inputs[0]->grad_buffer();
    for (std::size_t o = 0; o < argmax.size(); ++o) {
      if (argmax[o] >= 0) g[argmax[o]] += n.grad[static_cast<Index>(o)];
    }
  });
}

/// Nearest-neighbour 2x upsampling.
template <typename Scalar> Var<Scalar> upsample2(Var<Scalar> const &input)
{
  auto const &xs = input.shape();
  if (xs.size() != 3) throw ShapeError("upsample2: input must be [C,H,W], got " + to_string(xs));
  Index const c = xs[0], h = xs[1], w = xs[2];
  Tensor<Scalar> out(Shape{c, 2 * h, 2 * w});
  auto const &x = input.value();
  for (Index ch = 0; ch < c; ++ch)
    for (Index i = 0; i < 2 * h; ++i)
      for (Index j = 0; j < 2 * w; ++j) out.at(ch, i, j) = x.at(ch, i / 2, j / 2);
  return make_op<Scalar>("upsample2", std::move(out), {input}, [](Node<Scalar> &n) {
    auto &g = n.inputs[0]->grad_buffer();
    auto const &s = g.shape();
    for (Index ch = 0; ch < s[0]; ++ch)
      for (Index i = 0; i < 2 * s[1]; ++i)
        for (Index j = 0; j < 2 * s[2]; ++j) g.at(ch, i / 2, j / 2) += n.grad.at(ch, i, j);
  });
}

/// Stacks two [C,H,W] tensors along the channel axis.
template <typename Scalar> Var<Scalar> concat_channels(Var<Scalar> const &a, Var<Scalar> const &b)
{
  auto const &as = a.shape();
  auto const &bs = b.shape();
  if (as.size() != 3 || bs.size() != 3 || as[1] != bs[1] || as[2] != bs[2]) {
    throw ShapeError("concat_channels: spatial mismatch " + to_string(as) + " vs " + to_string(bs));
  }
  Tensor<Scalar> out(Shape{as[0] + bs[0], as[1], as[2]});
  Index const na = a.size();
  out.data().head(na) = a.value().data();
  out.data().tail(b.size()) = b.value().data();
  return make_op<Scalar>("concat_channels", std::move(out), {a, b}, [na](Node<Scalar> &n) {
    if (n.inputs[0]->requires_grad) n.inputs[0]->grad_buffer().data() += n.grad.data().head(na);
    if (n.inputs[1]->requires_grad) {
      n.inputs[1]->grad_buffer().data() += n.grad.data().tail(n.grad.size() - na);
    }
  });
}

/// Inverted dropout. In eval mode, or with rate 0, the input is returned
/// untouched.
template <typename Scalar> Var<Scalar> dropout(Var<Scalar> const &input, double rate, Rng &rng, Mode mode)
{
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout: rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (mode == Mode::eval || rate == 0.0) return input;
  Scalar const keep_scale = Scalar(1.0 / (1.0 - rate));
  typename Tensor<Scalar>::Array mask(input.size());
  for (Index i = 0; i < mask.size(); ++i) mask[i] = rng.uniform() < rate ? Scalar(0) : keep_scale;
  Tensor<Scalar> out(input.shape(), input.value().data() * mask);
  return make_op<Scalar>("dropout", std::move(out), {input}, [mask = std::move(mask)](Node<Scalar> &n) {
    n.inputs[0]->grad_buffer().data() += n.grad.data() * mask;
  });
}

} // namespace ddgan
