// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/transition.hpp"

#include "ddgan/errors.hpp"

#include <cmath>

namespace ddgan {

Index TransitionSpec::eeg_length() const { return std::lround(rho * static_cast<double>(target_len)); }

void TransitionSpec::validate() const
{
  std::vector<std::string> p;
  if (!(rho > 0.0 && rho < 1.0)) p.push_back("transition.rho must lie strictly between 0 and 1");
  if (target_len < 2) p.push_back("transition.target_len must be >= 2");
  if (p.empty() && (eeg_length() < 1 || speech_length() < 1)) {
    p.push_back("transition rho " + std::to_string(rho) + " leaves an empty segment at target_len " +
                std::to_string(target_len));
  }
  if (!p.empty()) throw ConfigError::from(p);
}

TransitionSpec TransitionSpec::for_pair(SignalRecord const &u, SignalRecord const &v, double rho)
{
  return {rho, std::max(u.size(), v.size())};
}

double parse_proportion(std::string const &text)
{
  auto num = [&](std::string const &s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (std::exception const &) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("bad proportion '" + text + "'");
    return v;
  };
  double rho = 0.0;
  if (auto c = text.find(':'); c != std::string::npos) {
    double const a = num(text.substr(0, c)), b = num(text.substr(c + 1));
    rho = a / (a + b);
  } else if (auto s = text.find('/'); s != std::string::npos) {
    rho = num(text.substr(0, s)) / num(text.substr(s + 1));
  } else {
    rho = num(text);
  }
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("proportion '" + text + "' must give an EEG fraction in (0, 1)");
  return rho;
}

SignalRecord cascade(SignalRecord const &u, SignalRecord const &v, TransitionSpec const &spec)
{
  spec.validate();
  if (!u.normalized || !v.normalized) throw DataError("cascade: both signals must be normalized first");
  SignalRecord o;
  o.id = u.id + "|" + v.id;
  o.domain = Domain::o;
  o.sample_rate = u.sample_rate;
  o.normalized = true;
  o.samples.resize(spec.target_len);
  o.samples.head(spec.eeg_length()) = resample_linear(u.samples, spec.eeg_length());
  o.samples.tail(spec.speech_length()) = resample_linear(v.samples, spec.speech_length());
  return o;
}

std::pair<SignalRecord, SignalRecord> split(SignalRecord const &o, TransitionSpec const &spec)
{
  spec.validate();
  if (o.size() != spec.target_len) {
    throw ShapeError("split: transition signal '" + o.id + "' has " + std::to_string(o.size()) +
                     " samples but the transition recipe expects " + std::to_string(spec.target_len));
  }
  SignalRecord a = o, b = o;
  a.domain = Domain::u;
  a.samples = o.samples.head(spec.eeg_length());
  b.domain = Domain::v;
  b.samples = o.samples.tail(spec.speech_length());
  b.offset = o.offset + spec.eeg_length();
  return {std::move(a), std::move(b)};
}

PairedExample make_pair(SignalRecord u, SignalRecord v, double rho, std::string group_label)
{
  auto spec = TransitionSpec::for_pair(u, v, rho);
  SignalRecord o = cascade(u, v, spec);
  return {std::move(u), std::move(v), std::move(o), std::move(group_label)};
}

} // namespace ddgan
