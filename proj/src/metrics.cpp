// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/metrics.hpp"

#include "ddgan/errors.hpp"
#include "ddgan/io.hpp"
#include "ddgan/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ddgan {

double pcc(Eigen::Ref<Eigen::VectorXd const> const &x, Eigen::Ref<Eigen::VectorXd const> const &y)
{
  if (x.size() != y.size()) throw std::invalid_argument("pcc: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pcc: need at least two samples");
  if ((x.array() == x[0]).all() || (y.array() == y[0]).all()) {
    throw std::domain_error("pcc: correlation undefined for a constant signal");
  }
  auto const n = static_cast<double>(x.size());
  Eigen::ArrayXd const dx = x.array() - x.sum() / n;
  Eigen::ArrayXd const dy = y.array() - y.sum() / n;
  double const sxx = dx.square().sum();
  double const syy = dy.square().sum();
  double const r = (dx * dy).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Mel cepstrum

Index MelCepstrumConfig::frame_length(double rate) const { return std::max<Index>(2, std::lround(frame_ms * 1e-3 * rate)); }
Index MelCepstrumConfig::hop_length(double rate) const { return std::max<Index>(1, std::lround(hop_ms * 1e-3 * rate)); }
Index MelCepstrumConfig::fft_size(double rate) const { return spectral::next_pow2(frame_length(rate)); }

std::vector<std::string> MelCepstrumConfig::problems() const
{
  std::vector<std::string> p;
  if (!(frame_ms > 0)) p.push_back("mel.frame_ms must be positive");
  if (!(hop_ms > 0)) p.push_back("mel.hop_ms must be positive");
  if (!(frame_ms > hop_ms)) p.push_back("mel.frame_ms must exceed mel.hop_ms");
  if (mel_bands < 2) p.push_back("mel.mel_bands must be >= 2");
  if (coefficients < 2 || coefficients > mel_bands) p.push_back("mel.coefficients must lie in [2, mel_bands]");
  if (!(log_floor > 0)) p.push_back("mel.log_floor must be positive");
  return p;
}

void MelCepstrumConfig::validate() const
{
  if (auto p = problems(); !p.empty()) throw ConfigError::from(p);
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Eigen::MatrixXd mel_filterbank(int mel_bands, Index n_fft, double rate)
{
  Index const bins = n_fft / 2 + 1;
  double const top = hz_to_mel(rate / 2.0);
  Eigen::VectorXd edges(mel_bands + 2);
  for (int i = 0; i < mel_bands + 2; ++i) edges[i] = mel_to_hz(top * i / (mel_bands + 1));
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(mel_bands, bins);
  for (int m = 0; m < mel_bands; ++m) {
    double const lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (Index k = 0; k < bins; ++k) {
      double const f = static_cast<double>(k) * rate / static_cast<double>(n_fft);
      if (f > lo && f <= mid) {
        fb(m, k) = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        fb(m, k) = (hi - f) / (hi - mid);
      }
    }
  }
  return fb;
}

Index frame_count(Index n, Index frame, Index hop) { return n <= frame ? 1 : 1 + (n - frame) / hop; }

namespace {

/// Frames of x (zero-padded where short), Hann-windowed, one per column.
template <typename PerFrame> void for_each_frame(Eigen::Ref<Eigen::VectorXd const> const &x, Index frame, Index hop, PerFrame &&f)
{
  Eigen::VectorXd const w = spectral::hann(frame);
  Index const t = frame_count(x.size(), frame, hop);
  Eigen::VectorXd buf(frame);
  for (Index i = 0; i < t; ++i) {
    buf.setZero();
    Index const start = i * hop;
    Index const take = std::min(frame, x.size() - start);
    buf.head(take) = x.segment(start, take);
    f(i, Eigen::VectorXd(buf.cwiseProduct(w)));
  }
}

} // namespace

Eigen::MatrixXd mel_cepstrum(Eigen::Ref<Eigen::VectorXd const> const &x, double rate, MelCepstrumConfig const &cfg)
{
  cfg.validate();
  if (x.size() == 0) throw std::invalid_argument("mel_cepstrum: empty signal");
  Index const frame = cfg.frame_length(rate), hop = cfg.hop_length(rate), n_fft = cfg.fft_size(rate);
  Eigen::MatrixXd const fb = mel_filterbank(cfg.mel_bands, n_fft, rate);
  int const m = cfg.mel_bands;
  // Orthonormal DCT-II rows.
  Eigen::MatrixXd dct(cfg.coefficients, m);
  for (int k = 0; k < cfg.coefficients; ++k) {
    double const scale = std::sqrt((k == 0 ? 1.0 : 2.0) / m);
    for (int j = 0; j < m; ++j) dct(k, j) = scale * std::cos(std::numbers::pi * k * (j + 0.5) / m);
  }
  Eigen::MatrixXd out(frame_count(x.size(), frame, hop), cfg.coefficients);
  for_each_frame(x, frame, hop, [&](Index i, Eigen::VectorXd const &windowed) {
    Eigen::VectorXd const energies = fb * spectral::power_spectrum(windowed, n_fft);
    Eigen::VectorXd const logs = energies.cwiseMax(cfg.log_floor).array().log().matrix();
    out.row(i) = (dct * logs).transpose();
  });
  return out;
}

double mcd_from_cepstra(Eigen::Ref<Eigen::MatrixXd const> const &a, Eigen::Ref<Eigen::MatrixXd const> const &b,
                        bool *truncated)
{
  if (a.cols() != b.cols()) throw std::invalid_argument("mcd: coefficient counts differ");
  if (a.cols() < 2) throw std::invalid_argument("mcd: need at least one coefficient beyond c0");
  Index const t = std::min(a.rows(), b.rows());
  if (truncated) *truncated = a.rows() != b.rows();
  if (t == 0) throw std::invalid_argument("mcd: no frames");
  Index const k = a.cols() - 1;
  double acc = 0.0;
  for (Index i = 0; i < t; ++i) acc += (a.row(i).tail(k) - b.row(i).tail(k)).norm();
  return 10.0 / std::numbers::ln10 * acc / static_cast<double>(t);
}

double mcd(Eigen::Ref<Eigen::VectorXd const> const &v, Eigen::Ref<Eigen::VectorXd const> const &v_hat, double rate,
           MelCepstrumConfig const &cfg, bool *truncated)
{
  return mcd_from_cepstra(mel_cepstrum(v, rate, cfg), mel_cepstrum(v_hat, rate, cfg), truncated);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {
double pcc_or_nan(Eigen::VectorXd const &a, Eigen::VectorXd const &b)
{
  try {
    return pcc(a, b);
  } catch (std::domain_error const &) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}
} // namespace

EvalReport score_translations(std::vector<Eigen::VectorXd> const &outputs, std::vector<SignalRecord> const &references,
                              MelCepstrumConfig const &cfg)
{
  if (outputs.size() != references.size()) throw std::invalid_argument("score_translations: one output per reference");
  if (references.empty()) throw DataError("score_translations: empty reference set");
  std::vector<Eigen::MatrixXd> ref_cepstra;
  ref_cepstra.reserve(references.size());
  for (auto const &r : references) ref_cepstra.push_back(mel_cepstrum(r.samples, r.sample_rate, cfg));

  EvalReport report;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    Eigen::VectorXd out = outputs[i];
    double const rate = references[i].sample_rate;
    Eigen::MatrixXd const cep = mel_cepstrum(out, rate, cfg);
    std::size_t best = 0;
    double best_pcc = -std::numeric_limits<double>::infinity();
    double best_mcd = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t j = 0; j < references.size(); ++j) {
      auto const &ref = references[j].samples;
      Eigen::VectorXd cand = out;
      if (cand.size() != ref.size()) cand = resample_linear(out, ref.size());
      double r = pcc_or_nan(cand, ref);
      if (std::isnan(r)) r = -std::numeric_limits<double>::infinity();
      double const d = mcd_from_cepstra(cep, ref_cepstra[j]);
      bool better = !any || r > best_pcc;
      if (any && r == best_pcc) {
        better = d < best_mcd || (d == best_mcd && references[j].id < references[best].id);
      }
      if (better) {
        best = j;
        best_pcc = r;
        best_mcd = d;
        any = true;
      }
    }
    PairOutcome row;
    row.pair_id = references[i].id;
    row.hit = best == i;
    row.matched_id = references[best].id;
    Eigen::VectorXd own = out;
    if (own.size() != references[i].size()) own = resample_linear(out, references[i].size());
    row.pcc = pcc_or_nan(own, references[i].samples);
    row.mcd = mcd_from_cepstra(cep, ref_cepstra[i]);
    report.rows.push_back(std::move(row));
  }
  finalize(report);
  return report;
}

void finalize(EvalReport &report)
{
  report.hits = 0;
  report.misses = 0;
  double pcc_sum = 0.0, mcd_sum = 0.0;
  for (auto const &r : report.rows) {
    (r.hit ? report.hits : report.misses) += 1;
    pcc_sum += r.pcc;
    mcd_sum += r.mcd;
  }
  auto const n = static_cast<double>(report.rows.size());
  report.accuracy = report.rows.empty() ? 0.0 : static_cast<double>(report.hits) / static_cast<double>(report.hits + report.misses);
  report.mean_pcc = report.rows.empty() ? 0.0 : pcc_sum / n;
  report.mean_mcd = report.rows.empty() ? 0.0 : mcd_sum / n;
}

std::string EvalReport::to_csv() const
{
  std::string s = "pair_id,hit,pcc,mcd\n";
  char buf[128];
  for (auto const &r : rows) {
    std::snprintf(buf, sizeof buf, ",%d,%.6f,%.6f\n", r.hit ? 1 : 0, r.pcc, r.mcd);
    s += r.pair_id + buf;
  }
  return s;
}

std::string EvalReport::summary_json() const
{
  nlohmann::ordered_json j;
  j["pairs"] = rows.size();
  j["hits"] = hits;
  j["misses"] = misses;
  j["accuracy"] = accuracy;
  j["accuracy_pct"] = 100.0 * accuracy;
  j["mean_pcc"] = mean_pcc;
  j["mean_mcd_db"] = mean_mcd;
  j["seed"] = seed;
  j["accuracy_protocol"] =
      "nearest-neighbour matching: a translation counts as correct when its highest-PCC reference is its own pair "
      "(ties: lower MCD). This replaces listener transcription.";
  j["published_reference"] = {{"dual_dual_accuracy_pct", 78.53},
                              {"dual_dual_pcc", 0.838},
                              {"dual_dual_mcd_db", 3.793},
                              {"single_dualgan_accuracy_pct", 56.82},
                              {"note", "listener-study values on a private corpus; not comparable, not asserted"}};
  j["config"] = config;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Spectrogram

Eigen::MatrixXd spectrogram(Eigen::Ref<Eigen::VectorXd const> const &x, double rate, MelCepstrumConfig const &cfg)
{
  cfg.validate();
  if (x.size() == 0) throw std::invalid_argument("spectrogram: empty signal");
  Index const frame = cfg.frame_length(rate), hop = cfg.hop_length(rate), n_fft = cfg.fft_size(rate);
  Eigen::MatrixXd out(n_fft / 2 + 1, frame_count(x.size(), frame, hop));
  for_each_frame(x, frame, hop, [&](Index i, Eigen::VectorXd const &windowed) {
    out.col(i) = spectral::magnitude_spectrum(windowed, n_fft).cwiseMax(cfg.log_floor).array().log().matrix();
  });
  return out;
}

Eigen::MatrixXd export_spectrogram(Eigen::Ref<Eigen::VectorXd const> const &x, double rate, MelCepstrumConfig const &cfg,
                                   std::filesystem::path const &path)
{
  Eigen::MatrixXd s = spectrogram(x, rate, cfg);
  std::string text;
  char buf[40];
  for (Index r = 0; r < s.rows(); ++r) {
    for (Index c = 0; c < s.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%.9g", c ? "," : "", s(r, c));
      text += buf;
    }
    text += '\n';
  }
  write_file_atomic(path, text);
  return s;
}

} // namespace ddgan
