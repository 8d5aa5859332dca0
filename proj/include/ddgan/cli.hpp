// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "config.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "synth.hpp"
#include "transition.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ddgan {

/// Process exit codes.
enum ExitCode : int
{
  exit_ok = 0,
  exit_config = 1,
  exit_data = 2,
  exit_numerical = 3
};

/// Everything a command can be configured with. Defaults follow the
/// published setup where one exists.
struct RunConfig
{
  ModelConfig model;
  MelCepstrumConfig mel;
  std::string rho = "3:2"; // EEG:speech, or an EEG fraction

  std::string manifest;          // empty: use the synthetic corpus
  double model_rate = 8000.0;    // Hz, both domains are resampled to this
  std::string eeg_channels;      // comma-separated, empty selects all
  bool bandpass = false;         // apply the recorded passband at ingest
  double passband_lo = 1.0;
  double passband_hi = 50.0;
  Index synth_pairs = 16;
  std::uint64_t synth_seed = 0;
  Index synth_samples = 1024;

  std::int64_t steps = 500;
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = 100; // 0 disables intermediate checkpoints
  std::string precision = "f64";

  std::string sweep_proportions = "1:4,2:3,3:2,4:1";
  std::int64_t sweep_steps = 50;

  double attention_threshold = 60.0;
  double observation_sec = 3.0;
  double welch_sec = 1.0;

  std::string output_dir = "ddgan_out";

  FieldTable fields();
  double eeg_fraction() const;
  std::vector<std::string> channel_list() const;
  std::vector<double> proportion_list() const;
  std::vector<std::string> problems() const;
  /// Text form, readable by apply_config_file.
  std::string render() const;
};

/// Applies a config file over the defaults. Unknown keys and bad values are
/// collected into `problems`.
void apply_config_file(RunConfig &cfg, std::filesystem::path const &path, std::vector<std::string> &problems);

/// Loads a manifest's pairs: EEG CSV (or WAV) and speech WAV, resampled to
/// the model rate, normalized, padded to a common length and cascaded.
std::vector<PairedExample> load_pairs(std::filesystem::path const &manifest, RunConfig const &cfg);

/// The configured synthetic corpus.
std::vector<PairedExample> synthetic_pairs(RunConfig const &cfg);

/// Loads one EEG recording (CSV or WAV by extension) as a normalized record
/// at the model rate.
SignalRecord load_eeg_input(std::filesystem::path const &path, RunConfig const &cfg);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

} // namespace ddgan
