// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tensor.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace ddgan {

/// EEG (u), speech (v), or transition (o).
enum class Domain
{
  u,
  v,
  o
};

char domain_letter(Domain d);

struct SignalRecord
{
  std::string id;
  Domain domain = Domain::u;
  Eigen::VectorXd samples;
  double sample_rate = 0.0;            // Hz
  std::vector<std::string> channels;   // EEG source channels that were averaged
  bool normalized = false;
  bool all_zero = false;               // set by normalize() when there was nothing to scale
  Index offset = 0;                    // first sample within the parent recording
  double passband_lo = 0.0;            // recorded acquisition passband, Hz (0 = unknown)
  double passband_hi = 0.0;
  bool bandpass_applied = false;

  Index size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  /// Throws DataError when the record violates its invariants.
  void validate() const;
};

/// Divides by max|x|. All-zero input is returned unchanged with `all_zero` set.
SignalRecord normalize(SignalRecord sig);

/// Linear interpolation onto `n_out` points with both end points aligned.
Eigen::VectorXd resample_linear(Eigen::Ref<Eigen::VectorXd const> const &x, Index n_out);

/// Resamples to `rate` Hz, keeping duration (length rounds to nearest).
SignalRecord resample_to_rate(SignalRecord sig, double rate);

/// Zero-padded (or unchanged) copy of length n >= current length.
SignalRecord pad_to_length(SignalRecord sig, Index n);

/// Centered windowed-sinc (Hamming) band-pass FIR, output same length as input.
Eigen::VectorXd bandpass(Eigen::Ref<Eigen::VectorXd const> const &x, double rate, double lo, double hi,
                         Index taps = 801);

/// A signal laid out row-major in a square [1, S, S] tensor.
template <typename Scalar = double> struct MatrixView
{
  std::string source_id;
  Tensor<Scalar> matrix;
  Index pad_count = 0;

  Index original_length() const { return matrix.size() - pad_count; }
};

/// Square side needed for `length` samples when the side must be a multiple
/// of 2^depth.
Index matrix_side(Index length, int depth);

template <typename Scalar = double> MatrixView<Scalar> reshape_to_matrix(SignalRecord const &sig, int depth)
{
  Index const side = matrix_side(sig.size(), depth);
  Tensor<Scalar> m(Shape{1, side, side});
  m.data().head(sig.size()) = sig.samples.array().template cast<Scalar>();
  return {sig.id, std::move(m), side * side - sig.size()};
}

/// Inverse of reshape_to_matrix: flattens and drops the padding tail.
template <typename Scalar> Eigen::VectorXd unreshape(Tensor<Scalar> const &matrix, Index pad_count)
{
  if (pad_count < 0 || pad_count >= matrix.size()) {
    throw ShapeError("unreshape: pad count " + std::to_string(pad_count) + " invalid for " + to_string(matrix.shape()));
  }
  return matrix.data().head(matrix.size() - pad_count).template cast<double>().matrix();
}

template <typename Scalar> Eigen::VectorXd unreshape(MatrixView<Scalar> const &view)
{
  return unreshape(view.matrix, view.pad_count);
}

struct SegmentOptions
{
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  double min_gap_ms = 200.0;   // silence at least this long splits segments
  double min_length_ms = 100.0; // shorter segments are dropped
};

/// Energy-gated word segmentation. A frame is voiced when its mean-square
/// energy reaches `energy_threshold`. The voiced/silent frame transitions
/// bracket each boundary to one hop; segments extend to the outer end of
/// those brackets.
std::vector<SignalRecord> segment_words(SignalRecord const &sig, double energy_threshold,
                                        SegmentOptions const &opts = {});

} // namespace ddgan
