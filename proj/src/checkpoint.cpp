// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/config.hpp"
#include "ddgan/errors.hpp"
#include "ddgan/io.hpp"
#include "ddgan/trainer.hpp"

#include <bit>
#include <cstring>
#include <sstream>
#include <unordered_map>

namespace ddgan {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char magic[4] = {'D', 'D', 'G', 'N'};

template <typename Scalar> constexpr std::uint8_t dtype_tag() { return std::is_same_v<Scalar, double> ? 1 : 2; }

class Writer
{
public:
  template <typename T> void put(T v)
  {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    bytes.append(buf, sizeof(T));
  }
  void put_bytes(std::string_view s) { bytes.append(s); }
  std::string bytes;
};

class Reader
{
public:
  Reader(std::string const &bytes, std::string where)
    : bytes_(bytes)
    , where_(std::move(where))
  {
  }

  template <typename T> T get(char const *field)
  {
    T v;
    std::memcpy(&v, take(sizeof(T), field), sizeof(T));
    return v;
  }
  std::string_view get_bytes(std::size_t n, char const *field) { return {take(n, field), n}; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

private:
  char const *take(std::size_t n, char const *field)
  {
    if (n > remaining()) throw DataError(where_ + ": truncated while reading " + field);
    char const *p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::string const &bytes_;
  std::string where_;
  std::size_t pos_ = 0;
};

template <typename T> void put_tensor(Writer &w, std::string const &name, Tensor<T> const &t)
{
  w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
  w.put_bytes(name);
  w.put<std::uint8_t>(dtype_tag<T>());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
  for (auto e : t.shape()) w.put<std::uint64_t>(static_cast<std::uint64_t>(e));
  w.put_bytes(std::string_view(reinterpret_cast<char const *>(t.raw()), sizeof(T) * static_cast<std::size_t>(t.size())));
}

struct Record
{
  std::uint8_t dtype = 0;
  Shape shape;
  std::string_view payload;
};

std::unordered_map<std::string, Record> read_records(Reader &r, std::uint32_t count)
{
  std::unordered_map<std::string, Record> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto const len = r.get<std::uint32_t>("record name length");
    std::string name(r.get_bytes(len, "record name"));
    Record rec;
    rec.dtype = r.get<std::uint8_t>("record dtype");
    if (rec.dtype != 1 && rec.dtype != 2) throw DataError("checkpoint record '" + name + "': unknown dtype tag");
    auto const rank = r.get<std::uint32_t>("record rank");
    if (rank > 8) throw DataError("checkpoint record '" + name + "': implausible rank " + std::to_string(rank));
    std::uint64_t count_elems = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      auto const e = r.get<std::uint64_t>("record extent");
      if (e == 0 || e > (1ULL << 32)) throw DataError("checkpoint record '" + name + "': bad extent");
      rec.shape.push_back(static_cast<Index>(e));
      count_elems *= e;
    }
    std::size_t const width = rec.dtype == 1 ? 8 : 4;
    rec.payload = r.get_bytes(static_cast<std::size_t>(count_elems) * width, "record payload");
    if (!out.emplace(name, rec).second) throw DataError("checkpoint: duplicate record '" + name + "'");
  }
  return out;
}

template <typename Scalar> Tensor<Scalar> to_tensor(std::string const &name, Record const &rec)
{
  if (rec.dtype != dtype_tag<Scalar>()) {
    throw DataError("checkpoint record '" + name + "' has dtype " + std::to_string(rec.dtype) + ", expected " +
                    std::to_string(dtype_tag<Scalar>()));
  }
  Tensor<Scalar> t(rec.shape);
  std::memcpy(t.raw(), rec.payload.data(), rec.payload.size());
  return t;
}

template <typename Scalar> std::vector<std::string> optimizer_names(Model<Scalar> const &model, std::string const &group)
{
  std::vector<std::string> out;
  auto const named = model.named_parameters();
  auto keep = [&](std::string const &prefix) {
    for (auto const &[n, p] : named)
      if (n.rfind(prefix + ".", 0) == 0) out.push_back(n);
  };
  if (group == "critic") {
    for (std::size_t i = 0; i < model.loop_count(); ++i) {
      keep(model.loop(i).target_critic_name);
      keep(model.loop(i).source_critic_name);
    }
  } else {
    auto const &loop = model.loop(static_cast<std::size_t>(std::stoul(group)));
    keep(loop.forward_name);
    keep(loop.inverse_name);
  }
  return out;
}

std::string split_metadata_value(KeyValues const &kv, std::string const &key)
{
  for (auto const &[k, v] : kv)
    if (k == key) return v;
  throw DataError("checkpoint metadata lacks '" + key + "'");
}

KeyValues parse_metadata(std::string_view text)
{
  KeyValues out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto const eq = line.find('=');
    if (eq == std::string::npos) throw DataError("checkpoint metadata line without '=': " + line);
    out.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return out;
}

struct Parsed
{
  std::string bytes;
  KeyValues metadata;
  std::unordered_map<std::string, Record> records;
};

Parsed parse_file(std::filesystem::path const &path)
{
  Parsed p;
  try {
    p.bytes = read_text_file(path);
  } catch (std::exception const &e) {
    throw DataError(e.what());
  }
  std::string const where = "checkpoint " + path.string();
  if (p.bytes.size() < 4 + 4 + 8 || std::memcmp(p.bytes.data(), magic, 4) != 0) {
    throw DataError(where + ": bad magic bytes (expected DDGN)");
  }
  std::uint64_t stored = 0;
  std::memcpy(&stored, p.bytes.data() + p.bytes.size() - 8, 8);
  if (stored != fnv1a(std::string_view(p.bytes).substr(0, p.bytes.size() - 8))) {
    throw DataError(where + ": checksum mismatch (file corrupted or truncated)");
  }
  Reader r(p.bytes, where);
  r.get_bytes(4, "magic");
  auto const version = r.get<std::uint32_t>("version");
  if (version != checkpoint_version) {
    throw DataError(where + ": unsupported format version " + std::to_string(version));
  }
  auto const meta_len = r.get<std::uint32_t>("metadata length");
  p.metadata = parse_metadata(r.get_bytes(meta_len, "metadata"));
  auto const count = r.get<std::uint32_t>("record count");
  p.records = read_records(r, count);
  if (r.remaining() != 8) throw DataError(where + ": trailing bytes after the last record");
  return p;
}

} // namespace

template <typename Scalar> void save_checkpoint(TrainState<Scalar> const &state, std::filesystem::path const &path)
{
  ModelConfig cfg = state.model.config();
  KeyValues meta{{"format", "ddgan-checkpoint"}, {"precision", std::is_same_v<Scalar, double> ? "f64" : "f32"}};
  for (auto &kv : model_fields(cfg).values()) meta.push_back(std::move(kv));
  meta.emplace_back("train.step", std::to_string(state.step));
  meta.emplace_back("train.seed", std::to_string(state.seed));
  meta.emplace_back("train.rng", state.rng.state());
  meta.emplace_back("data.manifest_hash", state.manifest_hash);
  for (auto const &[k, v] : state.info) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw std::invalid_argument("checkpoint info entries must be single-line key=value pairs");
    }
    meta.emplace_back("info." + k, v);
  }
  std::string meta_text;
  for (auto const &[k, v] : meta) meta_text += k + "=" + v + "\n";

  std::vector<std::pair<std::string, Tensor<Scalar>>> tensors;
  for (auto const &[name, p] : state.model.named_parameters()) tensors.emplace_back(name, p.value());
  auto add_state = [&](std::string const &group, RmsProp<Scalar> const &opt) {
    auto const names = optimizer_names(state.model, group);
    for (std::size_t i = 0; i < names.size(); ++i) tensors.emplace_back("rms." + names[i], opt.state()[i]);
  };
  add_state("critic", state.critic_optimizer);
  for (std::size_t i = 0; i < state.generator_optimizers.size(); ++i) {
    add_state(std::to_string(i), state.generator_optimizers[i]);
  }

  std::vector<std::pair<std::string, Tensor<double>>> history;
  for (auto const &[name, series] : state.loss_history) {
    if (series.empty()) continue;
    Tensor<double> t(Shape{static_cast<Index>(series.size())});
    for (std::size_t i = 0; i < series.size(); ++i) t[static_cast<Index>(i)] = series[i];
    history.emplace_back("history." + name, std::move(t));
  }

  Writer w;
  w.put_bytes(std::string_view(magic, 4));
  w.put<std::uint32_t>(checkpoint_version);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta_text.size()));
  w.put_bytes(meta_text);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(tensors.size() + history.size()));
  for (auto const &[name, t] : tensors) put_tensor(w, name, t);
  for (auto const &[name, t] : history) put_tensor(w, name, t);
  w.put<std::uint64_t>(fnv1a(w.bytes));
  write_file_atomic(path, w.bytes);
}

KeyValues read_checkpoint_metadata(std::filesystem::path const &path) { return parse_file(path).metadata; }

template <typename Scalar> TrainState<Scalar> load_checkpoint(std::filesystem::path const &path)
{
  auto const parsed = parse_file(path);
  auto const &meta = parsed.metadata;
  std::string const where = "checkpoint " + path.string();
  std::string const precision = split_metadata_value(meta, "precision");
  if (precision != (std::is_same_v<Scalar, double> ? "f64" : "f32")) {
    throw DataError(where + ": stored precision " + precision + " does not match the requested one");
  }

  ModelConfig cfg;
  auto fields = model_fields(cfg);
  std::vector<std::string> problems;
  for (auto const &key : fields.keys()) {
    if (auto err = fields.set(key, split_metadata_value(meta, key)); !err.empty()) problems.push_back(err);
  }
  if (!problems.empty()) throw DataError(where + ": " + ConfigError::from(problems).what());

  std::uint64_t seed = 0;
  std::int64_t step = 0;
  try {
    seed = std::stoull(split_metadata_value(meta, "train.seed"));
    step = std::stoll(split_metadata_value(meta, "train.step"));
  } catch (std::logic_error const &) {
    throw DataError(where + ": malformed train.seed or train.step");
  }
  auto state = make_train_state<Scalar>(cfg, seed);
  state.step = step;
  try {
    state.rng.set_state(split_metadata_value(meta, "train.rng"));
  } catch (std::invalid_argument const &e) {
    throw DataError(where + ": " + e.what());
  }
  state.manifest_hash = split_metadata_value(meta, "data.manifest_hash");
  for (auto const &[k, v] : meta)
    if (k.rfind("info.", 0) == 0) state.info.emplace_back(k.substr(5), v);

  auto fetch = [&](std::string const &name, Tensor<Scalar> &into) {
    auto it = parsed.records.find(name);
    if (it == parsed.records.end()) throw DataError(where + ": missing record '" + name + "'");
    auto t = to_tensor<Scalar>(name, it->second);
    if (t.shape() != into.shape()) {
      throw DataError(where + ": record '" + name + "' has shape " + to_string(t.shape()) + ", model expects " +
                      to_string(into.shape()));
    }
    into = std::move(t);
  };
  std::size_t used = 0;
  for (auto &[name, p] : state.model.named_parameters()) {
    fetch(name, p.mutable_value());
    ++used;
  }
  auto load_state = [&](std::string const &group, RmsProp<Scalar> &opt) {
    auto const names = optimizer_names(state.model, group);
    for (std::size_t i = 0; i < names.size(); ++i) {
      fetch("rms." + names[i], opt.state()[i]);
      ++used;
    }
  };
  load_state("critic", state.critic_optimizer);
  for (std::size_t i = 0; i < state.generator_optimizers.size(); ++i) {
    load_state(std::to_string(i), state.generator_optimizers[i]);
  }
  for (auto &[name, series] : state.loss_history) {
    auto it = parsed.records.find("history." + name);
    if (it == parsed.records.end()) continue;
    auto const t = to_tensor<double>(it->first, it->second);
    series.assign(t.raw(), t.raw() + t.size());
    ++used;
  }
  if (used != parsed.records.size()) throw DataError(where + ": records that do not belong to this model");
  return state;
}

template void save_checkpoint<double>(TrainState<double> const &, std::filesystem::path const &);
template void save_checkpoint<float>(TrainState<float> const &, std::filesystem::path const &);
template TrainState<double> load_checkpoint<double>(std::filesystem::path const &);
template TrainState<float> load_checkpoint<float>(std::filesystem::path const &);

} // namespace ddgan
