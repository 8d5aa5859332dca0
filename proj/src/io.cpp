// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/io.hpp"

#include "ddgan/errors.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace ddgan {

namespace {

std::uint32_t le32(unsigned char const *p)
{
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
std::uint16_t le16(unsigned char const *p) { return static_cast<std::uint16_t>(p[0] | p[1] << 8); }

void put32(std::string &s, std::uint32_t v)
{
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put16(std::string &s, std::uint16_t v)
{
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

std::string trim(std::string_view s)
{
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto const e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto const pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string const &text, std::string const &where)
{
  double v = 0.0;
  auto const *end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw DataError(where + ": '" + text + "' is not a number");
  return v;
}

} // namespace

std::string read_text_file(fs::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(fs::path const &path, std::string const &bytes)
{
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// WAV

SignalRecord load_wav(fs::path const &path)
{
  std::string const bytes = read_text_file(path);
  auto const *p = reinterpret_cast<unsigned char const *>(bytes.data());
  std::size_t const n = bytes.size();
  std::string const where = path.string();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0) throw DataError(where + ": missing RIFF chunk id");
  if (std::memcmp(p + 8, "WAVE", 4) != 0) throw DataError(where + ": RIFF form type is not WAVE");

  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  unsigned char const *data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= n) {
    std::uint32_t const size = le32(p + pos + 4);
    std::size_t const body = pos + 8;
    if (body + size > n && std::memcmp(p + pos, "data", 4) != 0) {
      throw DataError(where + ": chunk '" + std::string(bytes.substr(pos, 4)) + "' size runs past end of file");
    }
    if (std::memcmp(p + pos, "fmt ", 4) == 0) {
      if (size < 16) throw DataError(where + ": fmt chunk size " + std::to_string(size) + " < 16");
      format = le16(p + body);
      channels = le16(p + body + 2);
      rate = le32(p + body + 4);
      block_align = le16(p + body + 12);
      bits = le16(p + body + 14);
      if (format == 0xFFFE) {
        if (size < 40) throw DataError(where + ": extensible fmt chunk too short");
        format = le16(p + body + 24); // sub-format GUID leads with the format tag
      }
      have_fmt = true;
    } else if (std::memcmp(p + pos, "data", 4) == 0) {
      data = p + body;
      data_size = std::min<std::size_t>(size, n - body); // tolerate truncated streams
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw DataError(where + ": no fmt chunk");
  if (!data) throw DataError(where + ": no data chunk");
  if (channels == 0) throw DataError(where + ": num_channels is 0");
  if (rate == 0) throw DataError(where + ": sample_rate is 0");
  bool const pcm16 = format == 1 && bits == 16;
  bool const float32 = format == 3 && bits == 32;
  if (format != 1 && format != 3) {
    throw DataError(where + ": unsupported audio_format " + std::to_string(format) + " (need 1=PCM or 3=float)");
  }
  if (!pcm16 && !float32) {
    throw DataError(where + ": unsupported bits_per_sample " + std::to_string(bits) + " for audio_format " +
                    std::to_string(format));
  }
  std::size_t const width = bits / 8;
  if (block_align != channels * width) throw DataError(where + ": block_align " + std::to_string(block_align) +
                                                       " inconsistent with channels and bits_per_sample");
  std::size_t const frames = data_size / block_align;
  if (frames == 0) throw DataError(where + ": data chunk holds no samples");

  SignalRecord sig;
  sig.id = path.stem().string();
  sig.domain = Domain::v;
  sig.sample_rate = rate;
  sig.samples.resize(static_cast<Index>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      unsigned char const *s = data + f * block_align + c * width;
      if (pcm16) {
        acc += static_cast<double>(static_cast<std::int16_t>(le16(s))) / 32768.0;
      } else {
        acc += static_cast<double>(std::bit_cast<float>(le32(s)));
      }
    }
    sig.samples[static_cast<Index>(f)] = channels == 1 ? acc : acc / channels;
  }
  if (!sig.samples.allFinite()) throw DataError(where + ": non-finite sample values");
  return sig;
}

void write_wav(fs::path const &path, Eigen::Ref<Eigen::VectorXd const> const &samples, double sample_rate,
               WavEncoding encoding)
{
  if (!(sample_rate > 0) || sample_rate > 4.0e9) throw DataError("write_wav: invalid sample rate");
  auto const rate = static_cast<std::uint32_t>(std::lround(sample_rate));
  std::uint16_t const bits = encoding == WavEncoding::pcm16 ? 16 : 32;
  std::uint16_t const width = bits / 8;
  auto const data_size = static_cast<std::uint32_t>(samples.size() * width);
  std::string s;
  s.reserve(44 + data_size);
  s += "RIFF";
  put32(s, 36 + data_size);
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, encoding == WavEncoding::pcm16 ? 1 : 3);
  put16(s, 1);
  put32(s, rate);
  put32(s, rate * width);
  put16(s, width);
  put16(s, bits);
  s += "data";
  put32(s, data_size);
  for (Index i = 0; i < samples.size(); ++i) {
    if (encoding == WavEncoding::pcm16) {
      double const q = std::clamp(std::round(samples[i] * 32768.0), -32768.0, 32767.0);
      put16(s, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      put32(s, std::bit_cast<std::uint32_t>(static_cast<float>(samples[i])));
    }
  }
  write_file_atomic(path, s);
}

// ---------------------------------------------------------------------------
// EEG CSV

SignalRecord load_eeg_csv(fs::path const &path, std::vector<std::string> const &selected_channels,
                          std::optional<double> rate)
{
  std::istringstream in(read_text_file(path));
  std::string const where = path.string();
  std::string line;
  std::vector<std::string> header;
  std::optional<double> file_rate;
  std::vector<std::size_t> columns;
  std::vector<double> values;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string const t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      auto const eq = t.find("rate=");
      if (eq != std::string::npos) file_rate = parse_number(trim(t.substr(eq + 5)), where + ":" + std::to_string(line_no));
      continue;
    }
    if (header.empty()) {
      header = split(t, ',');
      if (selected_channels.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) columns.push_back(i);
      } else {
        for (auto const &name : selected_channels) {
          auto const it = std::find(header.begin(), header.end(), name);
          if (it == header.end()) {
            std::string avail;
            for (auto const &h : header) avail += (avail.empty() ? "" : ", ") + h;
            throw DataError(where + ": channel '" + name + "' not found; available: " + avail);
          }
          columns.push_back(static_cast<std::size_t>(it - header.begin()));
        }
      }
      continue;
    }
    auto const cells = split(t, ',');
    if (cells.size() != header.size()) {
      throw DataError(where + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " values, found " + std::to_string(cells.size()));
    }
    double acc = 0.0;
    for (auto c : columns) acc += parse_number(cells[c], where + ":" + std::to_string(line_no));
    values.push_back(acc / static_cast<double>(columns.size()));
  }
  if (header.empty()) throw DataError(where + ": missing header row");
  if (values.empty()) throw DataError(where + ": no sample rows");
  double const fs = rate ? *rate : file_rate.value_or(0.0);
  if (!(fs > 0.0)) throw DataError(where + ": sample rate unknown (add a '# rate=<Hz>' line or pass a rate)");

  SignalRecord sig;
  sig.id = path.stem().string();
  sig.domain = Domain::u;
  sig.sample_rate = fs;
  sig.samples = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
  for (auto c : columns) sig.channels.push_back(header[c]);
  return sig;
}

void write_eeg_csv(fs::path const &path, std::vector<std::string> const &channel_names,
                   Eigen::Ref<Eigen::MatrixXd const> const &columns, double rate)
{
  if (static_cast<Index>(channel_names.size()) != columns.cols()) {
    throw DataError("write_eeg_csv: channel name count does not match column count");
  }
  std::string s;
  char buf[64];
  std::snprintf(buf, sizeof buf, "# rate=%.17g\n", rate);
  s += buf;
  for (std::size_t i = 0; i < channel_names.size(); ++i) s += (i ? "," : "") + channel_names[i];
  s += '\n';
  for (Index r = 0; r < columns.rows(); ++r) {
    for (Index c = 0; c < columns.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%.17g", c ? "," : "", columns(r, c));
      s += buf;
    }
    s += '\n';
  }
  write_file_atomic(path, s);
}

// ---------------------------------------------------------------------------
// Manifest and hashing

std::vector<ManifestEntry> read_manifest(fs::path const &path)
{
  std::istringstream in(read_text_file(path));
  fs::path const base = path.parent_path();
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string const t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto const f = split(t, '\t');
    if (f.size() != 4 || f[0].empty() || f[1].empty() || f[2].empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 4 tab-separated fields (pair_id, eeg_path, wav_path, group_label)");
    }
    auto resolve = [&](std::string const &p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
    out.push_back({f[0], resolve(f[1]), resolve(f[2]), f[3]});
  }
  return out;
}

void write_manifest(fs::path const &path, std::vector<ManifestEntry> const &entries)
{
  fs::path const base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  auto rel = [&](fs::path const &p) {
    auto r = p.lexically_relative(base);
    return (r.empty() || *r.begin() == "..") ? p.generic_string() : r.generic_string();
  };
  std::string s = "# pair_id\teeg_path\twav_path\tgroup_label\n";
  for (auto const &e : entries) s += e.pair_id + '\t' + rel(e.eeg_path) + '\t' + rel(e.wav_path) + '\t' + e.group_label + '\n';
  write_file_atomic(path, s);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed)
{
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_file(fs::path const &path, std::uint64_t seed) { return fnv1a(read_text_file(path), seed); }

std::uint64_t hash_manifest(fs::path const &path)
{
  std::uint64_t h = hash_file(path);
  for (auto const &e : read_manifest(path)) {
    h = hash_file(e.eeg_path, h);
    h = hash_file(e.wav_path, h);
  }
  return h;
}

std::string hex64(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

} // namespace ddgan
