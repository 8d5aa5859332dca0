// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/signal.hpp"

#include "ddgan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ddgan {

char domain_letter(Domain d)
{
  switch (d) {
  case Domain::u: return 'u';
  case Domain::v: return 'v';
  case Domain::o: return 'o';
  }
  return '?';
}

void SignalRecord::validate() const
{
  if (!(sample_rate > 0.0)) throw DataError("signal '" + id + "': sample rate must be positive");
  if (samples.size() == 0) throw DataError("signal '" + id + "': no samples");
  if (!samples.allFinite()) throw DataError("signal '" + id + "': non-finite samples");
  if (normalized && samples.cwiseAbs().maxCoeff() > 1.0 + 1e-12) {
    throw DataError("signal '" + id + "': marked normalized but exceeds unit amplitude");
  }
}

SignalRecord normalize(SignalRecord sig)
{
  double const peak = sig.samples.size() ? sig.samples.cwiseAbs().maxCoeff() : 0.0;
  if (peak == 0.0) {
    sig.all_zero = true;
  } else {
    sig.samples /= peak;
    sig.all_zero = false;
  }
  sig.normalized = true;
  return sig;
}

Eigen::VectorXd resample_linear(Eigen::Ref<Eigen::VectorXd const> const &x, Index n_out)
{
  Index const n_in = x.size();
  if (n_in < 1 || n_out < 1) throw ShapeError("resample_linear: empty input or output");
  Eigen::VectorXd y(n_out);
  if (n_in == 1 || n_out == 1) {
    y.setConstant(x[0]);
    return y;
  }
  double const step = static_cast<double>(n_in - 1) / static_cast<double>(n_out - 1);
  for (Index i = 0; i < n_out; ++i) {
    double const t = static_cast<double>(i) * step;
    auto lo = static_cast<Index>(std::floor(t));
    if (lo >= n_in - 1) {
      y[i] = x[n_in - 1];
      continue;
    }
    double const frac = t - static_cast<double>(lo);
    y[i] = frac == 0.0 ? x[lo] : x[lo] + frac * (x[lo + 1] - x[lo]);
  }
  return y;
}

SignalRecord resample_to_rate(SignalRecord sig, double rate)
{
  if (!(rate > 0.0)) throw DataError("resample_to_rate: target rate must be positive");
  if (rate == sig.sample_rate) return sig;
  auto const n = std::max<Index>(1, std::lround(static_cast<double>(sig.size()) * rate / sig.sample_rate));
  sig.samples = resample_linear(sig.samples, n);
  sig.sample_rate = rate;
  return sig;
}

SignalRecord pad_to_length(SignalRecord sig, Index n)
{
  if (n < sig.size()) throw ShapeError("pad_to_length: cannot shrink signal '" + sig.id + "'");
  Index const old = sig.size();
  sig.samples.conservativeResize(n);
  sig.samples.tail(n - old).setZero();
  return sig;
}

Eigen::VectorXd bandpass(Eigen::Ref<Eigen::VectorXd const> const &x, double rate, double lo, double hi, Index taps)
{
  if (!(lo > 0.0 && hi > lo && hi < rate / 2)) throw DataError("bandpass: need 0 < lo < hi < rate/2");
  if (taps < 3) taps = 3;
  if (taps % 2 == 0) ++taps;
  Index const half = taps / 2;
  Eigen::VectorXd h(taps);
  double const a = 2.0 * lo / rate, b = 2.0 * hi / rate;
  auto sinc = [](double t) { return t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t); };
  for (Index k = 0; k < taps; ++k) {
    double const t = static_cast<double>(k - half);
    double const window = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / (taps - 1));
    h[k] = (b * sinc(b * t) - a * sinc(a * t)) * window;
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  for (Index n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    Index const k0 = std::max<Index>(0, n + half - (x.size() - 1));
    Index const k1 = std::min<Index>(taps - 1, n + half);
    for (Index k = k0; k <= k1; ++k) acc += h[k] * x[n + half - k];
    y[n] = acc;
  }
  return y;
}

Index matrix_side(Index length, int depth)
{
  if (length < 1) throw ShapeError("matrix_side: empty signal");
  Index const m = Index{1} << depth;
  auto side = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(length))));
  while (side * side < length) ++side;
  while ((side - 1) * (side - 1) >= length && side > 1) --side;
  return (side + m - 1) / m * m;
}

std::vector<SignalRecord> segment_words(SignalRecord const &sig, double energy_threshold, SegmentOptions const &opts)
{
  std::vector<SignalRecord> out;
  double const fs = sig.sample_rate;
  auto const frame = std::max<Index>(1, std::lround(opts.frame_ms * 1e-3 * fs));
  auto const hop = std::max<Index>(1, std::lround(opts.hop_ms * 1e-3 * fs));
  Index const n = sig.size();
  if (n < frame) return out;
  Index const frames = 1 + (n - frame) / hop;
  std::vector<bool> voiced(static_cast<std::size_t>(frames));
  for (Index f = 0; f < frames; ++f) {
    double const e = sig.samples.segment(f * hop, frame).squaredNorm() / static_cast<double>(frame);
    voiced[static_cast<std::size_t>(f)] = e >= energy_threshold;
  }
  auto const max_gap_frames = static_cast<Index>(std::ceil(opts.min_gap_ms / opts.hop_ms));
  auto const min_len = static_cast<Index>(std::llround(opts.min_length_ms * 1e-3 * fs));

  // A voiced frame after a silent one puts the onset in
  // [(f - 1) * hop + frame, f * hop + frame); the offset after the last voiced
  // frame l lies in (l * hop, (l + 1) * hop]. Segments take the outer end of
  // each bracket so they cover the voiced run.
  auto emit = [&](Index first, Index last) {
    Index const begin = first == 0 ? 0 : std::min(n, (first - 1) * hop + frame);
    Index const end = last == frames - 1 ? n : std::min(n, (last + 1) * hop);
    if (end - begin < min_len) return;
    SignalRecord seg;
    seg.id = sig.id + "#" + std::to_string(out.size());
    seg.domain = sig.domain;
    seg.samples = sig.samples.segment(begin, end - begin);
    seg.sample_rate = fs;
    seg.channels = sig.channels;
    seg.normalized = sig.normalized;
    seg.offset = sig.offset + begin;
    seg.passband_lo = sig.passband_lo;
    seg.passband_hi = sig.passband_hi;
    seg.bandpass_applied = sig.bandpass_applied;
    out.push_back(std::move(seg));
  };

  Index first = -1, last = -1;
  for (Index f = 0; f < frames; ++f) {
    if (!voiced[static_cast<std::size_t>(f)]) continue;
    if (first >= 0 && f - last - 1 >= max_gap_frames) {
      emit(first, last);
      first = -1;
    }
    if (first < 0) first = f;
    last = f;
  }
  if (first >= 0) emit(first, last);
  return out;
}

} // namespace ddgan
