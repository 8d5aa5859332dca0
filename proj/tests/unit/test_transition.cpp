// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include "ddgan/errors.hpp"
#include "ddgan/synth.hpp"
#include "ddgan/trainer.hpp"
#include "ddgan/transition.hpp"

#include <doctest.h>

#include <sstream>

using namespace ddgan;

namespace {

SignalRecord random_record(Index n, Rng &rng, Domain d)
{
  SignalRecord s;
  s.id = d == Domain::u ? "u" : "v";
  s.domain = d;
  s.sample_rate = 8000.0;
  s.samples.resize(n);
  for (Index i = 0; i < n; ++i) s.samples[i] = rng.uniform(-1.0, 1.0);
  return normalize(std::move(s));
}

/// End-aligned linear interpolation written out point by point.
std::vector<double> interpolate(Eigen::VectorXd const &x, Index m)
{
  std::vector<double> y(static_cast<std::size_t>(m));
  Index const n = x.size();
  for (Index j = 0; j < m; ++j) {
    if (n == 1) {
      y[static_cast<std::size_t>(j)] = x[0];
      continue;
    }
    double const pos = m == 1 ? 0.0 : static_cast<double>(j) * static_cast<double>(n - 1) / static_cast<double>(m - 1);
    auto const i0 = std::min<Index>(static_cast<Index>(pos), n - 2);
    double const t = pos - static_cast<double>(i0);
    y[static_cast<std::size_t>(j)] = (1.0 - t) * x[i0] + t * x[i0 + 1];
  }
  return y;
}

} // namespace

TEST_SUITE("transition")
{
  TEST_CASE("3:2 over 1000 samples takes 600 from EEG and 400 from speech")
  {
    Rng rng(1);
    auto u = random_record(1000, rng, Domain::u), v = random_record(1000, rng, Domain::v);
    TransitionSpec spec{parse_proportion("3:2"), 1000};
    CHECK(spec.rho == 0.6);
    CHECK(TransitionSpec{}.rho == 0.6);
    CHECK(spec.eeg_length() == 600);
    CHECK(spec.speech_length() == 400);
    auto o = cascade(u, v, spec);
    CHECK(o.domain == Domain::o);
    CHECK(o.size() == 1000);
    auto const eu = interpolate(u.samples, 600), ev = interpolate(v.samples, 400);
    for (Index i = 0; i < 600; ++i) CHECK(o.samples[i] == doctest::Approx(eu[static_cast<std::size_t>(i)]).epsilon(1e-12));
    for (Index i = 0; i < 400; ++i)
      CHECK(o.samples[600 + i] == doctest::Approx(ev[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }

  TEST_CASE("equal halves of identical signals are identical")
  {
    Rng rng(2);
    auto u = random_record(301, rng, Domain::u);
    auto v = u;
    v.domain = Domain::v;
    TransitionSpec spec{0.5, 500};
    auto [a, b] = split(cascade(u, v, spec), spec);
    CHECK(a.size() == 250);
    CHECK(b.size() == 250);
    CHECK(a.samples == b.samples);
  }

  TEST_CASE("proportion notations")
  {
    CHECK(parse_proportion("0.6") == 0.6);
    CHECK(parse_proportion("3/5") == 0.6);
    CHECK(parse_proportion("1:4") == 0.2);
    CHECK(parse_proportion("4:1") == 0.8);
    CHECK_THROWS_AS(parse_proportion("1.2"), ConfigError);
    CHECK_THROWS_AS(parse_proportion("0:3"), ConfigError);
    CHECK_THROWS_AS(parse_proportion("abc"), ConfigError);
  }

  TEST_CASE("degenerate and mismatched specs are rejected")
  {
    Rng rng(3);
    auto u = random_record(10, rng, Domain::u), v = random_record(10, rng, Domain::v);
    CHECK_THROWS_AS(cascade(u, v, {0.0, 10}), ConfigError);
    CHECK_THROWS_AS(cascade(u, v, {0.6, 1}), ConfigError);
    CHECK_THROWS_AS(cascade(u, v, {0.01, 10}), ConfigError); // rounds to an empty EEG part
    auto o = cascade(u, v, {0.6, 10});
    CHECK_THROWS_AS(split(o, {0.6, 12}), ShapeError);
    auto raw = u;
    raw.normalized = false;
    CHECK_THROWS_AS(cascade(raw, v, {0.6, 10}), DataError);
  }

  TEST_CASE("fuzzed round trips are length-consistent and match the interpolation oracle")
  {
    Rng rng(4);
    for (int t = 0; t < 500; ++t) {
      auto u = random_record(2 + static_cast<Index>(rng.below(400)), rng, Domain::u);
      auto v = random_record(2 + static_cast<Index>(rng.below(400)), rng, Domain::v);
      double const rho = rng.uniform(0.1, 0.9);
      auto spec = TransitionSpec::for_pair(u, v, rho);
      CHECK(spec.target_len == std::max(u.size(), v.size()));
      auto o = cascade(u, v, spec);
      REQUIRE(o.size() == spec.target_len);
      auto [a, b] = split(o, spec);
      REQUIRE(a.size() == spec.eeg_length());
      REQUIRE(b.size() == spec.speech_length());
      CHECK(a.size() + b.size() == o.size());
      auto const ua = interpolate(Eigen::Map<Eigen::VectorXd const>(interpolate(u.samples, a.size()).data(), a.size()), u.size());
      auto const back = resample_linear(a.samples, u.size());
      double worst = 0.0;
      for (Index i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(back[i] - ua[static_cast<std::size_t>(i)]));
      CHECK(worst < 1e-9);
    }
  }

  TEST_CASE("changing rho moves only the boundary")
  {
    Rng rng(5);
    auto u = random_record(200, rng, Domain::u), v = random_record(150, rng, Domain::v);
    for (double rho : {0.2, 0.4, 0.6, 0.8}) {
      auto spec = TransitionSpec::for_pair(u, v, rho);
      auto [a, b] = split(cascade(u, v, spec), spec);
      CHECK(a.samples == resample_linear(u.samples, spec.eeg_length()));
      CHECK(b.samples == resample_linear(v.samples, spec.speech_length()));
    }
  }

  TEST_CASE("make_pair builds the transition member")
  {
    Rng rng(6);
    auto u = random_record(90, rng, Domain::u), v = random_record(120, rng, Domain::v);
    auto p = make_pair(u, v, 0.6, "g");
    CHECK(p.o.size() == 120);
    CHECK(p.o.samples == cascade(u, v, TransitionSpec::for_pair(u, v, 0.6)).samples);
    CHECK(p.group_label == "g");
  }
}

TEST_SUITE("proportion sweep")
{
  ModelConfig tiny()
  {
    ModelConfig cfg;
    cfg.generator.depth = 2;
    cfg.generator.base_channels = 2;
    cfg.generator.max_channels = 4;
    cfg.critic.layers = 2;
    cfg.critic.base_channels = 2;
    cfg.hyper.critic_iters = 1;
    return cfg;
  }

  TEST_CASE("four proportions give four well-formed rows, deterministically")
  {
    SynthConfig sc;
    sc.samples = 64;
    auto pairs = synthesize_dataset(4, 2, sc);
    SweepOptions opts;
    opts.steps = 2;
    opts.seed = 9;
    auto rows = proportion_sweep(pairs, tiny(), opts);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(rows[i].rho == opts.proportions[i]);
      CHECK(rows[i].accuracy >= 0.0);
      CHECK(rows[i].accuracy <= 1.0);
    }
    auto const csv = sweep_csv(rows);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "rho,accuracy,seed");
    int data_rows = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      ++data_rows;
      CHECK(line.find('.') == 1);
      CHECK(line.substr(2, 6).find_first_not_of("0123456789") == std::string::npos);
    }
    CHECK(data_rows == 4);
    CHECK(csv.find("0.95") != std::string::npos);
    CHECK(sweep_csv(proportion_sweep(pairs, tiny(), opts)) == csv);
  }
}
