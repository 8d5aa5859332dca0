// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

namespace ddgan::spectral {

/// Periodic Hann window of length n.
Eigen::VectorXd hann(Eigen::Index n);

/// |X_k|^2 for k = 0..n_fft/2 of the zero-padded frame.
Eigen::VectorXd power_spectrum(Eigen::Ref<Eigen::VectorXd const> const &frame, Eigen::Index n_fft);

/// Magnitude |X_k| for k = 0..n_fft/2.
Eigen::VectorXd magnitude_spectrum(Eigen::Ref<Eigen::VectorXd const> const &frame, Eigen::Index n_fft);

struct Psd
{
  Eigen::VectorXd freqs; // Hz
  Eigen::VectorXd density; // one-sided, power per Hz
  double resolution = 0.0; // Hz between bins
  Eigen::Index segments = 0;
};

/// Averaged Hann-windowed periodogram with 50% overlapping segments of
/// `segment_len` samples. Integrating `density` over frequency gives the
/// signal's mean power.
Psd welch(Eigen::Ref<Eigen::VectorXd const> const &x, double rate, Eigen::Index segment_len);

Eigen::Index next_pow2(Eigen::Index n);

} // namespace ddgan::spectral
