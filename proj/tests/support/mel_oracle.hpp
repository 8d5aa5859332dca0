// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

// Straight-line mel cepstrum, correlation and distortion references.

#pragma once

#include "oracles.hpp"

#include "ddgan/metrics.hpp"

#include <Eigen/Dense>

namespace oracle {

/// Cepstrum recomputed with nested loops and a naive DFT.
inline std::vector<std::vector<double>> mel_cepstrum(Eigen::VectorXd const &x, double rate, ddgan::MelCepstrumConfig const &cfg)
{
  Index const frame = std::lround(cfg.frame_ms * 1e-3 * rate), hop = std::lround(cfg.hop_ms * 1e-3 * rate);
  Index n_fft = 1;
  while (n_fft < frame) n_fft *= 2;
  int const m = cfg.mel_bands;
  auto mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto hz = [](double v) { return 700.0 * (std::pow(10.0, v / 2595.0) - 1.0); };
  std::vector<double> edge(static_cast<std::size_t>(m + 2));
  for (int i = 0; i < m + 2; ++i) edge[static_cast<std::size_t>(i)] = hz(mel(rate / 2.0) * i / (m + 1));
  auto const w = hann(frame);
  Index const frames = x.size() <= frame ? 1 : 1 + (x.size() - frame) / hop;
  std::vector<std::vector<double>> out;
  for (Index t = 0; t < frames; ++t) {
    std::vector<double> f(static_cast<std::size_t>(frame), 0.0);
    for (Index i = 0; i < frame && t * hop + i < x.size(); ++i) f[static_cast<std::size_t>(i)] = x[t * hop + i] * w[static_cast<std::size_t>(i)];
    auto const p = dft_power(f, n_fft);
    std::vector<double> logs(static_cast<std::size_t>(m));
    for (int b = 0; b < m; ++b) {
      double const lo = edge[static_cast<std::size_t>(b)], mid = edge[static_cast<std::size_t>(b + 1)], hi = edge[static_cast<std::size_t>(b + 2)];
      double e = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        double const fk = static_cast<double>(k) * rate / static_cast<double>(n_fft);
        double const weight = fk > lo && fk <= mid ? (fk - lo) / (mid - lo) : (fk > mid && fk < hi ? (hi - fk) / (hi - mid) : 0.0);
        e += weight * p[k];
      }
      logs[static_cast<std::size_t>(b)] = std::log(std::max(e, cfg.log_floor));
    }
    std::vector<double> row(static_cast<std::size_t>(cfg.coefficients));
    for (int k = 0; k < cfg.coefficients; ++k) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += logs[static_cast<std::size_t>(j)] * std::cos(std::numbers::pi * k * (j + 0.5) / m);
      row[static_cast<std::size_t>(k)] = acc * std::sqrt((k == 0 ? 1.0 : 2.0) / m);
    }
    out.push_back(row);
  }
  return out;
}

/// Pearson correlation written out as sums.
inline double pcc(Eigen::VectorXd const &x, Eigen::VectorXd const &y)
{
  double mx = 0.0, my = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Frame-averaged cepstral distance in dB over coefficients 1.., frames
/// beyond the shorter cepstrum dropped.
inline double mcd(std::vector<std::vector<double>> const &a, std::vector<std::vector<double>> const &b)
{
  std::size_t const t = std::min(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    double s = 0.0;
    for (std::size_t k = 1; k < a[i].size(); ++k) s += (a[i][k] - b[i][k]) * (a[i][k] - b[i][k]);
    acc += std::sqrt(s);
  }
  return 10.0 / std::log(10.0) * acc / static_cast<double>(t);
}

} // namespace oracle
