// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signal.hpp"

#include <vector>

namespace ddgan {

struct Band
{
  double lo, hi; // Hz
};

inline constexpr Band theta_band{4.0, 7.0};
inline constexpr Band low_beta_band{12.0, 15.0};
inline constexpr Band mid_beta_band{16.0, 20.0};

/// Power inside [f_lo, f_hi] from the Welch estimate with `window_sec`
/// segments: PSD integrated over the band's bins, bins sitting exactly on an
/// edge counted at half weight. A sinusoid of amplitude a contributes a^2/2.
/// Throws std::out_of_range for bands beyond Nyquist.
double band_power(SignalRecord const &sig, double f_lo, double f_hi, double window_sec = 1.0);

struct BandPowerReport
{
  double theta = 0.0;
  double low_beta = 0.0;
  double mid_beta = 0.0;
  double window_sec = 0.0;
  double attention = 0.0; // (low_beta + mid_beta) / theta, +inf when theta == 0
  bool theta_zero = false;
};

BandPowerReport attention_index(SignalRecord const &sig, double window_sec = 1.0);

enum class GateDecision
{
  admit,
  reject
};

/// Strict threshold: only attention > threshold admits.
GateDecision gate_decision(BandPowerReport const &report, double threshold = 60.0);
GateDecision gate(SignalRecord const &sig, double threshold = 60.0, double window_sec = 1.0);

struct WindowDecision
{
  double t_start = 0.0; // seconds
  BandPowerReport report;
  GateDecision decision = GateDecision::reject;
};

/// Splits a recording into consecutive `observation_sec` windows (a trailing
/// partial window is ignored) and gates each one.
std::vector<WindowDecision> scan_attention(SignalRecord const &sig, double threshold = 60.0,
                                           double observation_sec = 3.0, double window_sec = 1.0);

} // namespace ddgan
