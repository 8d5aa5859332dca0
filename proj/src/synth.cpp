// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/synth.hpp"

#include "ddgan/random.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace ddgan {

Eigen::VectorXd mixing_filter()
{
  Eigen::VectorXd h(24);
  for (Index k = 0; k < h.size(); ++k) {
    double const t = static_cast<double>(k);
    h[k] = std::exp(-t / 6.0) * std::cos(2.0 * std::numbers::pi * t / 12.0);
  }
  return h / h.cwiseAbs().sum();
}

PairedExample synthesize_pair(std::uint64_t seed, SynthConfig const &cfg, std::size_t index)
{
  Rng rng(seed);
  Index const n = cfg.samples;
  double const fs = cfg.sample_rate;
  double const two_pi = 2.0 * std::numbers::pi;

  // Speech: a few enveloped harmonic bursts around one fundamental.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  double const f0 = rng.uniform(cfg.f0_lo, cfg.f0_hi);
  int const bursts = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, cfg.max_bursts))));
  for (int b = 0; b < bursts; ++b) {
    auto const len = static_cast<Index>(rng.uniform(0.2, 0.5) * static_cast<double>(n));
    auto const start = static_cast<Index>(rng.uniform() * static_cast<double>(n - len));
    double const fb = f0 * rng.uniform(0.97, 1.03);
    double const amp = rng.uniform(0.5, 1.0);
    std::vector<double> phase(static_cast<std::size_t>(cfg.harmonics));
    for (auto &p : phase) p = rng.uniform(0.0, two_pi);
    for (Index i = 0; i < len; ++i) {
      double const env = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
      double const t = static_cast<double>(start + i) / fs;
      double s = 0.0;
      for (int h = 1; h <= cfg.harmonics; ++h) {
        s += std::sin(two_pi * h * fb * t + phase[static_cast<std::size_t>(h - 1)]) / h;
      }
      v[start + i] += amp * env * env * s;
    }
  }

  // EEG: saturating response to the filtered speech plus smoothed noise.
  Eigen::VectorXd const h = mixing_filter();
  Eigen::VectorXd u(n);
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Index k = 0; k < h.size() && k <= i; ++k) acc += h[k] * v[i - k];
    u[i] = std::tanh(cfg.mix_gain * acc);
  }
  Eigen::VectorXd white(n + 8);
  for (Index i = 0; i < white.size(); ++i) white[i] = rng.normal();
  for (Index i = 0; i < n; ++i) u[i] += cfg.noise_level * white.segment(i, 8).mean();

  char id[32];
  std::snprintf(id, sizeof id, "pair_%03zu", index);
  SignalRecord ur;
  ur.id = std::string(id) + "_u";
  ur.domain = Domain::u;
  ur.samples = u;
  ur.sample_rate = fs;
  ur.channels = {"T3", "T4", "T5", "T6"};
  SignalRecord vr = ur;
  vr.id = std::string(id) + "_v";
  vr.domain = Domain::v;
  vr.samples = v;
  vr.channels.clear();
  std::string const group = "group" + std::to_string(index % static_cast<std::size_t>(std::max(1, cfg.groups)));
  return make_pair(normalize(std::move(ur)), normalize(std::move(vr)), cfg.rho, group);
}

std::vector<PairedExample> synthesize_dataset(std::size_t n, std::uint64_t seed, SynthConfig const &cfg)
{
  std::vector<PairedExample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(synthesize_pair(mix_seed(seed, i), cfg, i));
  return out;
}

} // namespace ddgan
