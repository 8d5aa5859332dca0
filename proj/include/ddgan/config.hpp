// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "networks.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ddgan {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Named references into a configuration struct, used to read and write it
/// as `section.key = value` text.
class FieldTable
{
public:
  using Target = std::variant<int *, Index *, double *, bool *, std::string *, std::uint64_t *, Architecture *>;

  void add(std::string key, Target target) { fields_.emplace_back(std::move(key), target); }
  void append(FieldTable const &other);

  bool contains(std::string const &key) const;
  /// Parses `value` into the field. Returns a problem description, empty on
  /// success (unknown keys included).
  std::string set(std::string const &key, std::string const &value);
  KeyValues values() const;
  std::vector<std::string> keys() const;

private:
  std::vector<std::pair<std::string, Target>> fields_;
};

/// `generator.*`, `critic.*` and `model.*` keys.
FieldTable model_fields(ModelConfig &cfg);

std::string format_double(double v);

/// Section-aware `key = value` parser. `[name]` headers prefix the keys that
/// follow with `name.`; `#` and `;` start comments. Malformed lines are
/// appended to `problems` with their line number.
KeyValues parse_key_values(std::string const &text, std::vector<std::string> &problems);

/// Renders sorted-by-section text that parse_key_values reads back.
std::string render_key_values(KeyValues const &kv);

} // namespace ddgan
