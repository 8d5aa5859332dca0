// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ddgan::spectral {

using Eigen::Index;

Eigen::VectorXd hann(Index n)
{
  Eigen::VectorXd w(n);
  for (Index i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

namespace {
std::vector<std::complex<double>> half_spectrum(Eigen::Ref<Eigen::VectorXd const> const &frame, Index n_fft)
{
  if (frame.size() > n_fft) throw std::invalid_argument("frame longer than FFT size");
  std::vector<double> time(static_cast<std::size_t>(n_fft), 0.0);
  for (Index i = 0; i < frame.size(); ++i) time[static_cast<std::size_t>(i)] = frame[i];
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, time);
  freq.resize(static_cast<std::size_t>(n_fft / 2 + 1));
  return freq;
}
} // namespace

Eigen::VectorXd power_spectrum(Eigen::Ref<Eigen::VectorXd const> const &frame, Index n_fft)
{
  auto const spec = half_spectrum(frame, n_fft);
  Eigen::VectorXd p(static_cast<Index>(spec.size()));
  for (std::size_t k = 0; k < spec.size(); ++k) p[static_cast<Index>(k)] = std::norm(spec[k]);
  return p;
}

Eigen::VectorXd magnitude_spectrum(Eigen::Ref<Eigen::VectorXd const> const &frame, Index n_fft)
{
  auto const spec = half_spectrum(frame, n_fft);
  Eigen::VectorXd p(static_cast<Index>(spec.size()));
  for (std::size_t k = 0; k < spec.size(); ++k) p[static_cast<Index>(k)] = std::abs(spec[k]);
  return p;
}

Psd welch(Eigen::Ref<Eigen::VectorXd const> const &x, double rate, Index segment_len)
{
  if (segment_len < 2 || segment_len > x.size()) {
    throw std::invalid_argument("welch: segment length must lie in [2, signal length]");
  }
  Eigen::VectorXd const w = hann(segment_len);
  double const w_energy = w.squaredNorm();
  Index const step = std::max<Index>(1, segment_len / 2);
  Index const count = 1 + (x.size() - segment_len) / step;
  Index const bins = segment_len / 2 + 1;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(bins);
  for (Index s = 0; s < count; ++s) {
    Eigen::VectorXd frame = x.segment(s * step, segment_len).cwiseProduct(w);
    acc += power_spectrum(frame, segment_len);
  }
  Psd out;
  out.segments = count;
  out.resolution = rate / static_cast<double>(segment_len);
  out.density = acc / (static_cast<double>(count) * rate * w_energy);
  // One-sided: fold negative frequencies in, except DC and (even length) Nyquist.
  Index const last = segment_len % 2 == 0 ? bins - 1 : bins;
  out.density.segment(1, last - 1) *= 2.0;
  out.freqs = Eigen::VectorXd::LinSpaced(bins, 0.0, static_cast<double>(bins - 1)) * out.resolution;
  return out;
}

Index next_pow2(Index n)
{
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

} // namespace ddgan::spectral
