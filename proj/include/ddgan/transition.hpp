// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signal.hpp"

#include <string>
#include <utility>

namespace ddgan {

/// Recipe for a transition signal: the first `eeg_length()` samples come from
/// the EEG side, the remaining `speech_length()` from the speech side.
struct TransitionSpec
{
  double rho = 0.6; // EEG fraction; 3:2 by default
  Index target_len = 0;

  Index eeg_length() const;
  Index speech_length() const { return target_len - eeg_length(); }
  /// Throws ConfigError when degenerate.
  void validate() const;

  /// target_len = the longer of the two signals.
  static TransitionSpec for_pair(SignalRecord const &u, SignalRecord const &v, double rho);
};

/// Parses "0.6", "3/5" or "3:2" (EEG part first) into an EEG fraction.
double parse_proportion(std::string const &text);

/// EEG resampled to eeg_length(), then speech resampled to speech_length().
SignalRecord cascade(SignalRecord const &u, SignalRecord const &v, TransitionSpec const &spec);

/// Exact inverse of cascade's concatenation: (EEG part, speech part).
std::pair<SignalRecord, SignalRecord> split(SignalRecord const &o, TransitionSpec const &spec);

struct PairedExample
{
  SignalRecord u;
  SignalRecord v;
  SignalRecord o;
  std::string group_label;
};

/// Builds the transition member of a pair; u and v must be normalized.
PairedExample make_pair(SignalRecord u, SignalRecord v, double rho, std::string group_label);

} // namespace ddgan
