// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/attention.hpp"

#include "ddgan/errors.hpp"
#include "ddgan/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddgan {

namespace {

Index segment_length(SignalRecord const &sig, double window_sec)
{
  auto const len = static_cast<Index>(std::lround(window_sec * sig.sample_rate));
  if (len < 2) throw std::invalid_argument("attention: analysis window shorter than two samples");
  if (len > sig.size()) {
    throw std::invalid_argument("attention: window of " + std::to_string(window_sec) + " s exceeds signal duration " +
                                std::to_string(sig.duration()) + " s");
  }
  return len;
}

double integrate(spectral::Psd const &psd, double lo, double hi)
{
  double const tol = 1e-9 * psd.resolution;
  double acc = 0.0;
  for (Index k = 0; k < psd.freqs.size(); ++k) {
    double const f = psd.freqs[k];
    if (f < lo - tol || f > hi + tol) continue;
    double const weight = (std::abs(f - lo) <= tol || std::abs(f - hi) <= tol) ? 0.5 : 1.0;
    acc += weight * psd.density[k];
  }
  return acc * psd.resolution;
}

void check_band(SignalRecord const &sig, double lo, double hi)
{
  if (!(lo >= 0.0 && hi > lo)) throw std::out_of_range("band limits must satisfy 0 <= lo < hi");
  if (!(sig.sample_rate > 2.0 * hi)) {
    throw std::out_of_range("band upper edge " + std::to_string(hi) + " Hz is not below Nyquist for rate " +
                            std::to_string(sig.sample_rate) + " Hz");
  }
}

} // namespace

double band_power(SignalRecord const &sig, double f_lo, double f_hi, double window_sec)
{
  check_band(sig, f_lo, f_hi);
  auto const psd = spectral::welch(sig.samples, sig.sample_rate, segment_length(sig, window_sec));
  return integrate(psd, f_lo, f_hi);
}

BandPowerReport attention_index(SignalRecord const &sig, double window_sec)
{
  check_band(sig, mid_beta_band.lo, mid_beta_band.hi);
  auto const psd = spectral::welch(sig.samples, sig.sample_rate, segment_length(sig, window_sec));
  BandPowerReport r;
  r.window_sec = window_sec;
  r.theta = integrate(psd, theta_band.lo, theta_band.hi);
  r.low_beta = integrate(psd, low_beta_band.lo, low_beta_band.hi);
  r.mid_beta = integrate(psd, mid_beta_band.lo, mid_beta_band.hi);
  if (r.theta > 0.0) {
    r.attention = (r.low_beta + r.mid_beta) / r.theta;
  } else {
    r.theta_zero = true;
    r.attention = std::numeric_limits<double>::infinity();
  }
  return r;
}

GateDecision gate_decision(BandPowerReport const &report, double threshold)
{
  // An empty spectrum carries no attention evidence despite the infinite ratio.
  if (report.theta_zero && report.low_beta + report.mid_beta == 0.0) return GateDecision::reject;
  return report.attention > threshold ? GateDecision::admit : GateDecision::reject;
}

GateDecision gate(SignalRecord const &sig, double threshold, double window_sec)
{
  return gate_decision(attention_index(sig, window_sec), threshold);
}

std::vector<WindowDecision> scan_attention(SignalRecord const &sig, double threshold, double observation_sec,
                                           double window_sec)
{
  auto const len = static_cast<Index>(std::lround(observation_sec * sig.sample_rate));
  if (len < 1) throw std::invalid_argument("scan_attention: observation window is empty");
  std::vector<WindowDecision> out;
  for (Index start = 0; start + len <= sig.size(); start += len) {
    SignalRecord w = sig;
    w.samples = sig.samples.segment(start, len);
    w.offset = sig.offset + start;
    WindowDecision d;
    d.t_start = static_cast<double>(start) / sig.sample_rate;
    d.report = attention_index(w, window_sec);
    d.decision = gate_decision(d.report, threshold);
    out.push_back(d);
  }
  return out;
}

} // namespace ddgan
