// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "signal.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ddgan {

enum class WavEncoding
{
  pcm16,
  float32
};

/// Reads RIFF/WAVE with 16-bit integer PCM or 32-bit IEEE float samples.
/// Multichannel audio is averaged to mono; integer samples are scaled by
/// 1/32768. Throws DataError naming the offending header field.
SignalRecord load_wav(std::filesystem::path const &path);

void write_wav(std::filesystem::path const &path, Eigen::Ref<Eigen::VectorXd const> const &samples,
               double sample_rate, WavEncoding encoding = WavEncoding::pcm16);

/// EEG CSV: optional `# rate=<Hz>` comment, a header row of channel names,
/// then one comma-separated row per sample. The selected channels (all when
/// empty) are averaged into one trace.
SignalRecord load_eeg_csv(std::filesystem::path const &path, std::vector<std::string> const &selected_channels,
                          std::optional<double> rate = std::nullopt);

void write_eeg_csv(std::filesystem::path const &path, std::vector<std::string> const &channel_names,
                   Eigen::Ref<Eigen::MatrixXd const> const &columns, double rate);

struct ManifestEntry
{
  std::string pair_id;
  std::filesystem::path eeg_path;
  std::filesystem::path wav_path;
  std::string group_label;
};

/// Tab-separated lines `pair_id  eeg_path  wav_path  group_label`; `#` starts
/// a comment. Relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> read_manifest(std::filesystem::path const &path);

/// Paths are written relative to the manifest's directory when possible.
void write_manifest(std::filesystem::path const &path, std::vector<ManifestEntry> const &entries);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t hash_file(std::filesystem::path const &path, std::uint64_t seed = 0xcbf29ce484222325ULL);
/// Hash of the manifest text and every file it references, in order.
std::uint64_t hash_manifest(std::filesystem::path const &path);
std::string hex64(std::uint64_t v);

std::string read_text_file(std::filesystem::path const &path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(std::filesystem::path const &path, std::string const &bytes);

} // namespace ddgan
