// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/config.hpp"

#include "ddgan/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace ddgan {

namespace {

std::string trim(std::string_view s)
{
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto const e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename Int> bool parse_int(std::string const &text, Int &out)
{
  auto const *first = text.data();
  auto const *last = text.data() + text.size();
  auto const [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_double(std::string const &text, double &out)
{
  if (text.empty()) return false;
  char *end = nullptr;
  errno = 0;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size();
}

} // namespace

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void FieldTable::append(FieldTable const &other)
{
  fields_.insert(fields_.end(), other.fields_.begin(), other.fields_.end());
}

bool FieldTable::contains(std::string const &key) const
{
  return std::any_of(fields_.begin(), fields_.end(), [&](auto const &f) { return f.first == key; });
}

std::string FieldTable::set(std::string const &key, std::string const &value)
{
  auto it = std::find_if(fields_.begin(), fields_.end(), [&](auto const &f) { return f.first == key; });
  if (it == fields_.end()) return "unknown key '" + key + "'";
  bool ok = std::visit(
      [&](auto *p) -> bool {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          return parse_double(value, *p);
        } else if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1") return *p = true, true;
          if (value == "false" || value == "0") return *p = false, true;
          return false;
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = value;
          return true;
        } else if constexpr (std::is_same_v<T, Architecture>) {
          if (value != "dual_dual" && value != "single") return false;
          *p = parse_architecture(value);
          return true;
        } else {
          return parse_int(value, *p);
        }
      },
      it->second);
  if (!ok) return "bad value '" + value + "' for key '" + key + "'";
  return {};
}

KeyValues FieldTable::values() const
{
  KeyValues out;
  for (auto const &[key, target] : fields_) {
    std::string text = std::visit(
        [](auto *p) -> std::string {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, double>) {
            return format_double(*p);
          } else if constexpr (std::is_same_v<T, bool>) {
            return *p ? "true" : "false";
          } else if constexpr (std::is_same_v<T, std::string>) {
            return *p;
          } else if constexpr (std::is_same_v<T, Architecture>) {
            return to_string(*p);
          } else {
            return std::to_string(*p);
          }
        },
        target);
    out.emplace_back(key, std::move(text));
  }
  return out;
}

std::vector<std::string> FieldTable::keys() const
{
  std::vector<std::string> out;
  for (auto const &f : fields_) out.push_back(f.first);
  return out;
}

FieldTable model_fields(ModelConfig &cfg)
{
  FieldTable t;
  t.add("model.architecture", &cfg.architecture);
  auto &h = cfg.hyper;
  t.add("model.lambda_u", &h.lambda_u);
  t.add("model.lambda_v", &h.lambda_v);
  t.add("model.lambda_o", &h.lambda_o);
  t.add("model.critic_iters", &h.critic_iters);
  t.add("model.batch_size", &h.batch_size);
  t.add("model.learning_rate", &h.learning_rate);
  t.add("model.clip", &h.clip);
  t.add("model.rms_decay", &h.rms_decay);
  t.add("model.rms_eps", &h.rms_eps);
  t.add("model.detach_large_cycle", &h.detach_large_cycle);
  auto &g = cfg.generator;
  t.add("generator.depth", &g.depth);
  t.add("generator.kernel", &g.kernel);
  t.add("generator.conv_stride", &g.conv_stride);
  t.add("generator.pool_stride", &g.pool_stride);
  t.add("generator.activation_slope", &g.activation_slope);
  t.add("generator.decoder_slope", &g.decoder_slope);
  t.add("generator.dropout_rate", &g.dropout_rate);
  t.add("generator.base_channels", &g.base_channels);
  t.add("generator.max_channels", &g.max_channels);
  auto &c = cfg.critic;
  t.add("critic.layers", &c.layers);
  t.add("critic.kernel", &c.kernel);
  t.add("critic.stride", &c.stride);
  t.add("critic.base_channels", &c.base_channels);
  t.add("critic.max_channels", &c.max_channels);
  t.add("critic.activation_slope", &c.activation_slope);
  return t;
}

KeyValues parse_key_values(std::string const &text, std::vector<std::string> &problems)
{
  KeyValues out;
  std::istringstream in(text);
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto const hash = line.find_first_of("#;");
    std::string const body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        problems.push_back("line " + std::to_string(number) + ": malformed section header '" + body + "'");
        continue;
      }
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    auto const eq = body.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(number) + ": expected 'key = value', got '" + body + "'");
      continue;
    }
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      problems.push_back("line " + std::to_string(number) + ": empty key");
      continue;
    }
    if (!section.empty()) key = section + "." + key;
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::string render_key_values(KeyValues const &kv)
{
  std::string out, current;
  for (auto const &[key, value] : kv) {
    auto const dot = key.find('.');
    std::string const section = dot == std::string::npos ? std::string() : key.substr(0, dot);
    std::string const name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (section != current) {
      if (!out.empty()) out += '\n';
      out += "[" + section + "]\n";
      current = section;
    }
    out += name + " = " + value + "\n";
  }
  return out;
}

} // namespace ddgan
