// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signal.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ddgan {

/// Pearson correlation, population convention. Throws std::invalid_argument
/// on length mismatch or fewer than two samples, std::domain_error when
/// either input is constant.
double pcc(Eigen::Ref<Eigen::VectorXd const> const &x, Eigen::Ref<Eigen::VectorXd const> const &y);

struct MelCepstrumConfig
{
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  int mel_bands = 26;
  int coefficients = 13; // columns of the cepstrum, c0 (energy) included
  double log_floor = 1e-10;

  Index frame_length(double rate) const;
  Index hop_length(double rate) const;
  Index fft_size(double rate) const;
  std::vector<std::string> problems() const;
  void validate() const;
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular HTK-style mel filterbank, [mel_bands, n_fft/2 + 1].
Eigen::MatrixXd mel_filterbank(int mel_bands, Index n_fft, double rate);

/// Number of analysis frames for `n` samples (short signals give one
/// zero-padded frame).
Index frame_count(Index n, Index frame, Index hop);

/// Hann frames -> power spectrum -> mel filterbank -> log -> orthonormal
/// DCT-II. Returns [frames, coefficients].
Eigen::MatrixXd mel_cepstrum(Eigen::Ref<Eigen::VectorXd const> const &x, double rate,
                             MelCepstrumConfig const &cfg = {});

/// Mel-cepstral distortion in dB between two cepstra: frame-averaged
/// Euclidean distance over coefficients 1.., scaled by 10/ln 10. Frames
/// beyond the shorter input are dropped and `truncated` is set.
double mcd_from_cepstra(Eigen::Ref<Eigen::MatrixXd const> const &a, Eigen::Ref<Eigen::MatrixXd const> const &b,
                        bool *truncated = nullptr);

double mcd(Eigen::Ref<Eigen::VectorXd const> const &v, Eigen::Ref<Eigen::VectorXd const> const &v_hat, double rate,
           MelCepstrumConfig const &cfg = {}, bool *truncated = nullptr);

struct PairOutcome
{
  std::string pair_id;
  bool hit = false;
  double pcc = 0.0; // against the paired reference; NaN if undefined
  double mcd = 0.0; // dB against the paired reference
  std::string matched_id;
};

struct EvalReport
{
  std::vector<PairOutcome> rows;
  Index hits = 0;
  Index misses = 0;
  double accuracy = 0.0; // hits / (hits + misses)
  double mean_pcc = 0.0;
  double mean_mcd = 0.0;
  std::uint64_t seed = 0;
  std::string config; // free-form snapshot of the run configuration

  /// `pair_id,hit,pcc,mcd`
  std::string to_csv() const;
  /// JSON summary with aggregates, seed, configuration and reference values.
  std::string summary_json() const;
};

/// Nearest-neighbour scoring: output i is a hit when, among all references,
/// the highest PCC with output i belongs to reference i. PCC ties go to the
/// lower MCD, then to the lexicographically smaller reference id, so the
/// result does not depend on reference order. Undefined PCC ranks lowest.
EvalReport score_translations(std::vector<Eigen::VectorXd> const &outputs, std::vector<SignalRecord> const &references,
                              MelCepstrumConfig const &cfg = {});

/// Recomputes the aggregates from the rows.
void finalize(EvalReport &report);

/// Log-magnitude STFT, [n_fft/2 + 1 bins, frames]; values are ln(max(|X|, floor)).
Eigen::MatrixXd spectrogram(Eigen::Ref<Eigen::VectorXd const> const &x, double rate, MelCepstrumConfig const &cfg = {});

/// Writes spectrogram() as CSV (rows = frequency bins, columns = frames) and
/// returns it.
Eigen::MatrixXd export_spectrogram(Eigen::Ref<Eigen::VectorXd const> const &x, double rate,
                                   MelCepstrumConfig const &cfg, std::filesystem::path const &path);

} // namespace ddgan
