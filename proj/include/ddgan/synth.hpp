// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "transition.hpp"

#include <cstdint>
#include <vector>

namespace ddgan {

/// Synthetic paired corpus: speech-like harmonic bursts, and pseudo-EEG
/// obtained from them through a fixed nonlinear mixing filter plus
/// band-limited noise.
struct SynthConfig
{
  double sample_rate = 8000.0;
  Index samples = 1024;
  double f0_lo = 150.0; // fundamental band, Hz
  double f0_hi = 400.0;
  int harmonics = 4;
  int max_bursts = 3;
  double noise_level = 0.15;
  double mix_gain = 3.0;
  double rho = 0.6;
  int groups = 4;
};

/// Pure function of (seed, config, index); `index` only picks the
/// round-robin group label.
PairedExample synthesize_pair(std::uint64_t seed, SynthConfig const &cfg, std::size_t index = 0);

/// `n` pairs with seeds derived from `seed`, ids `pair_000`, ...
std::vector<PairedExample> synthesize_dataset(std::size_t n, std::uint64_t seed, SynthConfig const &cfg);

/// The fixed FIR used inside the EEG mixing stage.
Eigen::VectorXd mixing_filter();

} // namespace ddgan
