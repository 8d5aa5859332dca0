// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

// Straight-line reference implementations used as test oracles. Nothing here
// calls into the library's numerical kernels; the networks are re-evaluated
// from their raw weights with plain loops.

#pragma once

#include "ddgan/networks.hpp"
#include "ddgan/random.hpp"
#include "ddgan/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ctime>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

using ddgan::Index;
using ddgan::Shape;
using ddgan::Tensor;

struct Image
{
  Index c = 0, h = 0, w = 0;
  std::vector<double> v;

  Image() = default;
  Image(Index c_, Index h_, Index w_) : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_ * h_ * w_), 0.0) {}
  explicit Image(Tensor<double> const &t) : Image(t.dim(0), t.dim(1), t.dim(2))
  {
    for (Index i = 0; i < t.size(); ++i) v[static_cast<std::size_t>(i)] = t[i];
  }
  double &at(Index ch, Index i, Index j) { return v[static_cast<std::size_t>((ch * h + i) * w + j)]; }
  double at(Index ch, Index i, Index j) const { return v[static_cast<std::size_t>((ch * h + i) * w + j)]; }
  Tensor<double> tensor() const
  {
    Tensor<double> t(Shape{c, h, w});
    for (Index i = 0; i < t.size(); ++i) t[i] = v[static_cast<std::size_t>(i)];
    return t;
  }
};

inline double kernel_at(Tensor<double> const &k, Index a, Index b, Index i, Index j) { return k.at(a, b, i, j); }

/// Cross-correlation, kernels [C_out, C_in, kh, kw].
inline Image conv2d(Image const &x, Tensor<double> const &k, Index stride, Index pad)
{
  Index const co = k.dim(0), kh = k.dim(2), kw = k.dim(3);
  Index const oh = (x.h + 2 * pad - kh) / stride + 1;
  Index const ow = (x.w + 2 * pad - kw) / stride + 1;
  Image y(co, oh, ow);
  for (Index o = 0; o < co; ++o)
    for (Index i = 0; i < oh; ++i)
      for (Index j = 0; j < ow; ++j) {
        double acc = 0.0;
        for (Index ci = 0; ci < x.c; ++ci)
          for (Index a = 0; a < kh; ++a)
            for (Index b = 0; b < kw; ++b) {
              Index const r = i * stride - pad + a, q = j * stride - pad + b;
              if (r >= 0 && r < x.h && q >= 0 && q < x.w) acc += x.at(ci, r, q) * kernel_at(k, o, ci, a, b);
            }
        y.at(o, i, j) = acc;
      }
  return y;
}

/// Scatter form of the transposed convolution, kernels [C_in, C_out, kh, kw].
inline Image conv2d_transposed(Image const &x, Tensor<double> const &k, Index stride, Index pad)
{
  Index const co = k.dim(1), kh = k.dim(2), kw = k.dim(3);
  Index const oh = (x.h - 1) * stride - 2 * pad + kh;
  Index const ow = (x.w - 1) * stride - 2 * pad + kw;
  Image y(co, oh, ow);
  for (Index ci = 0; ci < x.c; ++ci)
    for (Index i = 0; i < x.h; ++i)
      for (Index j = 0; j < x.w; ++j)
        for (Index o = 0; o < co; ++o)
          for (Index a = 0; a < kh; ++a)
            for (Index b = 0; b < kw; ++b) {
              Index const r = i * stride - pad + a, q = j * stride - pad + b;
              if (r >= 0 && r < oh && q >= 0 && q < ow) y.at(o, r, q) += x.at(ci, i, j) * kernel_at(k, ci, o, a, b);
            }
  return y;
}

inline Image add_bias(Image x, Tensor<double> const &bias)
{
  for (Index ch = 0; ch < x.c; ++ch)
    for (Index i = 0; i < x.h; ++i)
      for (Index j = 0; j < x.w; ++j) x.at(ch, i, j) += bias[ch];
  return x;
}

inline Image maxpool2(Image const &x)
{
  Index const oh = (x.h + 1) / 2, ow = (x.w + 1) / 2;
  Image y(x.c, oh, ow);
  for (Index ch = 0; ch < x.c; ++ch)
    for (Index i = 0; i < oh; ++i)
      for (Index j = 0; j < ow; ++j) {
        double best = -1e300;
        for (Index a = 0; a < 2; ++a)
          for (Index b = 0; b < 2; ++b) {
            Index const r = 2 * i + a, q = 2 * j + b;
            best = std::max(best, (r < x.h && q < x.w) ? x.at(ch, r, q) : 0.0);
          }
        y.at(ch, i, j) = best;
      }
  return y;
}

inline Image upsample2(Image const &x)
{
  Image y(x.c, 2 * x.h, 2 * x.w);
  for (Index ch = 0; ch < x.c; ++ch)
    for (Index i = 0; i < y.h; ++i)
      for (Index j = 0; j < y.w; ++j) y.at(ch, i, j) = x.at(ch, i / 2, j / 2);
  return y;
}

inline Image concat(Image const &a, Image const &b)
{
  Image y(a.c + b.c, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), y.v.begin());
  std::copy(b.v.begin(), b.v.end(), y.v.begin() + static_cast<std::ptrdiff_t>(a.v.size()));
  return y;
}

inline Image leaky(Image x, double slope)
{
  for (auto &e : x.v) e = e >= 0.0 ? e : slope * e;
  return x;
}

inline Image tanh(Image x)
{
  for (auto &e : x.v) e = std::tanh(e);
  return x;
}

inline double mean(Image const &x)
{
  double s = 0.0;
  for (double e : x.v) s += e;
  return s / static_cast<double>(x.v.size());
}

inline double l1(Image const &a, Image const &b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) s += std::abs(a.v[i] - b.v[i]);
  return s / static_cast<double>(a.v.size());
}

/// Eval-mode generator forward from raw weights.
inline Image generator(ddgan::Generator<double> &g, Image const &x)
{
  auto const &cfg = g.config();
  Index const pad = cfg.kernel / 2;
  std::vector<Image> skips;
  Image h = x;
  for (auto &layer : g.encoder()) {
    h = leaky(add_bias(conv2d(h, layer.weight.value(), 1, pad), layer.bias.value()), cfg.activation_slope);
    skips.push_back(h);
    h = maxpool2(h);
  }
  for (int s = cfg.depth - 1; s >= 0; --s) {
    auto &layer = g.decoder()[static_cast<std::size_t>(s)];
    h = concat(upsample2(h), skips[static_cast<std::size_t>(s)]);
    h = leaky(add_bias(conv2d_transposed(h, layer.weight.value(), 1, pad), layer.bias.value()), cfg.decoder_slope);
  }
  return tanh(add_bias(conv2d(h, g.head().weight.value(), 1, pad), g.head().bias.value()));
}

inline double critic(ddgan::Critic<double> &d, Image const &x)
{
  auto const &cfg = d.config();
  Index const pad = cfg.kernel / 2;
  Image h = x;
  auto &layers = d.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    h = add_bias(conv2d(h, layers[l].weight.value(), cfg.stride, pad), layers[l].bias.value());
    if (l + 1 < layers.size()) h = leaky(h, cfg.activation_slope);
  }
  return mean(h);
}

// ---------------------------------------------------------------------------
// Numerics

inline Tensor<double> random_tensor(Shape shape, ddgan::Rng &rng, double scale = 1.0)
{
  Tensor<double> t(std::move(shape));
  for (Index i = 0; i < t.size(); ++i) t[i] = scale * rng.uniform(-1.0, 1.0);
  return t;
}

/// Central differences of a scalar function of `x`, perturbing in place.
template <typename F> std::vector<double> numeric_gradient(F &&f, Tensor<double> &x, double h = 1e-5)
{
  std::vector<double> g(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) {
    double const keep = x[i];
    x[i] = keep + h;
    double const up = f();
    x[i] = keep - h;
    double const down = f();
    x[i] = keep;
    g[static_cast<std::size_t>(i)] = (up - down) / (2.0 * h);
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||), zero when both vanish.
inline double relative_error(Tensor<double> const &a, std::vector<double> const &b)
{
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    double const bi = b[static_cast<std::size_t>(i)];
    diff += (a[i] - bi) * (a[i] - bi);
    na += a[i] * a[i];
    nb += bi * bi;
  }
  double const denom = std::sqrt(std::max(na, nb));
  return denom < 1e-300 ? 0.0 : std::sqrt(diff) / denom;
}

/// Naive DFT power |X_k|^2 for k = 0..n_fft/2 of a zero-padded frame.
inline std::vector<double> dft_power(std::vector<double> const &frame, Index n_fft)
{
  std::vector<double> p(static_cast<std::size_t>(n_fft / 2 + 1));
  for (Index k = 0; k <= n_fft / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < frame.size(); ++t) {
      double const ang = -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(t) / static_cast<double>(n_fft);
      acc += frame[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    p[static_cast<std::size_t>(k)] = std::norm(acc);
  }
  return p;
}

inline std::vector<double> hann(Index n)
{
  std::vector<double> w(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

// ---------------------------------------------------------------------------
// Fixtures

/// Model whose generators are all x -> tanh(c x) with c small, built from
/// delta kernels: the encoder splits x into leaky(x) and leaky(-x), the
/// decoder forwards only the skip path, and the head takes their difference,
/// which is exactly linear in x. Translation is then a monotone, nearly
/// linear map of the input, so a speech reference equal to the input is
/// reproduced with correlation 1 up to rounding.
inline ddgan::Model<double> lookup_model(ddgan::ModelConfig cfg, double gain = 1e-3)
{
  cfg.generator.depth = 1;
  cfg.generator.base_channels = 2;
  cfg.generator.max_channels = 2;
  ddgan::Model<double> model(cfg, 1);
  int const k = cfg.generator.kernel;
  int const mid = k / 2;
  for (std::size_t l = 0; l < model.loop_count(); ++l) {
    for (auto *g : {&model.loop(l).forward, &model.loop(l).inverse}) {
      auto &enc = g->encoder()[0];
      enc.weight.mutable_value() = Tensor<double>(enc.weight.shape());
      enc.weight.mutable_value().at(0, 0, mid, mid) = 1.0;
      enc.weight.mutable_value().at(1, 0, mid, mid) = -1.0;
      enc.bias.mutable_value() = Tensor<double>(enc.bias.shape());
      auto &dec = g->decoder()[0]; // [4 in (2 pooled + 2 skip), 2 out, k, k]
      dec.weight.mutable_value() = Tensor<double>(dec.weight.shape());
      dec.weight.mutable_value().at(2, 0, mid, mid) = 1.0;
      dec.weight.mutable_value().at(3, 1, mid, mid) = 1.0;
      dec.bias.mutable_value() = Tensor<double>(dec.bias.shape());
      auto &head = g->head();
      head.weight.mutable_value() = Tensor<double>(head.weight.shape());
      head.weight.mutable_value().at(0, 0, mid, mid) = gain;
      head.weight.mutable_value().at(0, 1, mid, mid) = -gain;
      head.bias.mutable_value() = Tensor<double>(head.bias.shape());
    }
  }
  return model;
}

/// Fresh directory under the system temp path, removed on destruction.
struct TempDir
{
  std::filesystem::path path;
  explicit TempDir(std::string const &tag)
  {
    ddgan::Rng rng(std::hash<std::string>{}(tag) ^ static_cast<std::uint64_t>(std::time(nullptr)));
    path = std::filesystem::temp_directory_path() / ("ddgan_" + tag + "_" + std::to_string(rng.next() % 1000000007));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(std::string const &name) const { return path / name; }
};

} // namespace oracle
