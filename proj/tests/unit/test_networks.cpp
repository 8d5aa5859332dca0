// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include "ddgan/errors.hpp"
#include "ddgan/networks.hpp"

#include <doctest.h>

using namespace ddgan;

namespace {

GeneratorConfig small_generator(int depth)
{
  GeneratorConfig cfg;
  cfg.depth = depth;
  cfg.base_channels = 2;
  cfg.max_channels = 8;
  return cfg;
}

CriticConfig small_critic(int layers)
{
  CriticConfig cfg;
  cfg.layers = layers;
  cfg.base_channels = 2;
  cfg.max_channels = 8;
  return cfg;
}

Var<double> input(Index side, Rng &rng) { return Var<double>::constant(oracle::random_tensor(Shape{1, side, side}, rng)); }

Index expected_generator_parameters(GeneratorConfig const &c)
{
  Index const k2 = Index{c.kernel} * c.kernel;
  Index total = 0;
  for (int s = 0; s < c.depth; ++s) {
    Index const in = s == 0 ? 1 : c.channels(s - 1);
    total += k2 * in * c.channels(s) + c.channels(s);
    Index const below = s == c.depth - 1 ? c.channels(s) : c.channels(s + 1);
    total += k2 * (below + c.channels(s)) * c.channels(s) + c.channels(s);
  }
  return total + k2 * c.channels(0) + 1;
}

} // namespace

TEST_SUITE("networks")
{
  TEST_CASE("depth 1 on 8x8 keeps the shape and pools once")
  {
    Generator<double> g(small_generator(1), 1);
    Rng rng(1);
    auto x = input(8, rng);
    auto y = g.forward(x, Mode::eval, rng);
    CHECK(y.shape() == Shape{1, 8, 8});
    auto const &enc = g.encoder().front();
    auto h = leaky_relu(add_bias(conv2d(x, enc.weight, 1, 1), enc.bias), 0.2);
    CHECK(maxpool2(h).shape() == Shape{2, 4, 4});
  }

  TEST_CASE("generator output matches the loop oracle and stays in [-1, 1]")
  {
    for (int depth : {1, 2, 3}) {
      Generator<double> g(small_generator(depth), 10 + static_cast<std::uint64_t>(depth));
      Rng rng(2);
      for (auto &l : g.encoder()) l.bias.mutable_value() = oracle::random_tensor(l.bias.shape(), rng, 0.1);
      auto x = input(16, rng);
      x.mutable_value().data() *= 50.0;
      auto y = g.forward(x, Mode::eval, rng);
      auto const want = oracle::generator(g, oracle::Image(x.value()));
      for (Index i = 0; i < y.size(); ++i) {
        CHECK(std::abs(y.value()[i]) <= 1.0);
        CHECK(y.value()[i] == doctest::Approx(want.v[static_cast<std::size_t>(i)]).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("plain ReLU on the up-sampling path")
  {
    auto cfg = small_generator(2);
    cfg.decoder_slope = 0.0;
    Generator<double> relu(cfg, 12), leaky(small_generator(2), 12);
    Rng rng(3);
    auto x = input(8, rng);
    auto y = relu.forward(x, Mode::eval, rng);
    auto const want = oracle::generator(relu, oracle::Image(x.value()));
    for (Index i = 0; i < y.size(); ++i) CHECK(y.value()[i] == doctest::Approx(want.v[static_cast<std::size_t>(i)]).epsilon(1e-10));
    CHECK_FALSE((y.value().data() == leaky.forward(x, Mode::eval, rng).value().data()).all());
    cfg.decoder_slope = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("parameter count matches the closed form")
  {
    for (int depth : {1, 2, 4}) {
      auto cfg = small_generator(depth);
      Generator<double> g(cfg, 3);
      CHECK(g.parameter_count() == expected_generator_parameters(cfg));
      Index counted = 0;
      for (auto const &p : g.parameters()) counted += p.size();
      CHECK(counted == g.parameter_count());
    }
    GeneratorConfig def;
    Generator<double> g(def, 3);
    CHECK(g.parameter_count() == expected_generator_parameters(def));
  }

  TEST_CASE("encoder input never straddles a pooling boundary")
  {
    Generator<double> g(small_generator(2), 4);
    CHECK_NOTHROW(g.check_input(Shape{1, 8, 12}));
    try {
      g.check_input(Shape{1, 10, 8});
      FAIL("expected ShapeError");
    } catch (ShapeError const &e) {
      std::string const what = e.what();
      CHECK(what.find("pad side 10 by 2 to 12") != std::string::npos);
    }
    CHECK_THROWS_AS(g.check_input(Shape{2, 8, 8}), ShapeError);
  }

  TEST_CASE("eval mode is deterministic and train-mode dropout is not")
  {
    Generator<double> g(small_generator(2), 5);
    Rng rng(5);
    auto x = input(16, rng);
    Rng r1(7), r2(8);
    auto a = g.forward(x, Mode::eval, r1), b = g.forward(x, Mode::eval, r2);
    CHECK((a.value().data() == b.value().data()).all());
    auto c = g.forward(x, Mode::train, r1), d = g.forward(x, Mode::train, r2);
    CHECK(c.shape() == a.shape());
    CHECK_FALSE((c.value().data() == d.value().data()).all());
  }

  TEST_CASE("every generator and critic parameter is on a live gradient path")
  {
    Generator<double> g(small_generator(3), 6);
    Critic<double> d(small_critic(3), 6);
    Rng rng(6);
    for (auto &[name, p] : g.named_parameters()) p.mutable_value() = oracle::random_tensor(p.shape(), rng, 0.3);
    for (auto &[name, p] : d.named_parameters()) p.mutable_value() = oracle::random_tensor(p.shape(), rng, 0.3);
    backward(d.score(g.forward(input(16, rng), Mode::eval, rng)));
    for (auto const &[name, p] : g.named_parameters()) {
      INFO(name);
      CHECK(p.grad().data().abs().maxCoeff() > 0.0);
    }
    for (auto const &[name, p] : d.named_parameters()) {
      INFO(name);
      CHECK(p.grad().data().abs().maxCoeff() > 0.0);
    }
  }

  TEST_CASE("critic accepts 16 and 32 pixel inputs with finite scores")
  {
    Critic<double> d(CriticConfig{}, 7);
    Rng rng(7);
    for (Index side : {16, 32}) {
      auto x = input(side, rng);
      double const s = d.score(x).item();
      CHECK(std::isfinite(s));
      CHECK(s == doctest::Approx(oracle::critic(d, oracle::Image(x.value()))).epsilon(1e-10));
    }
    CHECK_THROWS_AS(d.score(Var<double>::constant(Tensor<double>(Shape{2, 16, 16}))), ShapeError);
  }

  TEST_CASE("all-zero critic scores zero")
  {
    Critic<double> d(small_critic(3), 8);
    for (auto &[name, p] : d.named_parameters()) p.mutable_value().data().setZero();
    Rng rng(8);
    CHECK(d.score(input(16, rng)).item() == 0.0);
  }

  TEST_CASE("clipped critic is translation covariant away from the border")
  {
    Critic<double> d(small_critic(2), 9);
    Rng rng(9);
    for (auto &[name, p] : d.named_parameters()) {
      p.mutable_value() = oracle::random_tensor(p.shape(), rng, 0.01);
    }
    Tensor<double> a(Shape{1, 32, 32}), b(Shape{1, 32, 32});
    for (Index i = 0; i < 4; ++i) {
      for (Index j = 0; j < 4; ++j) {
        double const v = rng.uniform(-1.0, 1.0);
        a.at(0, 10 + i, 10 + j) = v;
        b.at(0, 14 + i, 18 + j) = v; // shifted by multiples of the total stride
      }
    }
    double const sa = d.score(Var<double>::constant(a)).item(), sb = d.score(Var<double>::constant(b)).item();
    CHECK(sa == doctest::Approx(sb).epsilon(1e-12));
    CHECK(d.patch_map(Var<double>::constant(a)).shape() == Shape{1, 8, 8});
  }

  TEST_CASE("model wiring")
  {
    ModelConfig cfg;
    cfg.generator = small_generator(1);
    cfg.critic = small_critic(2);
    Model<double> dual(cfg, 1);
    REQUIRE(dual.loop_count() == 2);
    CHECK(dual.loop(0).source == "u");
    CHECK(dual.loop(0).target == "o");
    CHECK(dual.loop(1).source == "v");
    CHECK(dual.loop(1).target == "o");
    cfg.architecture = Architecture::single;
    Model<double> single(cfg, 1);
    REQUIRE(single.loop_count() == 1);
    CHECK(single.loop(0).target == "v");
    CHECK(parse_architecture("single") == Architecture::single);
    CHECK(parse_architecture(to_string(Architecture::dual_dual)) == Architecture::dual_dual);
    CHECK_THROWS_AS(parse_architecture("triple"), ConfigError);

    Rng rng(2);
    auto u = input(8, rng);
    auto via = dual.loop(1).inverse.forward(dual.loop(0).forward.forward(u, Mode::eval, rng), Mode::eval, rng);
    CHECK((dual.translate(u, Mode::eval, rng).value().data() == via.value().data()).all());

    std::size_t gen = 0;
    for (auto const &[name, p] : dual.named_parameters()) gen += p.size() > 0 ? 1 : 0;
    CHECK(gen == dual.named_parameters().size());
    CHECK(dual.generator_parameters().size() + dual.critic_parameters().size() == dual.named_parameters().size());
  }

  TEST_CASE("configuration validation")
  {
    ModelConfig cfg;
    CHECK(cfg.problems().empty());
    cfg.generator.depth = 0;
    cfg.critic.layers = 0;
    cfg.hyper.clip = -1.0;
    CHECK(cfg.problems().size() >= 3);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    ModelConfig heavy;
    heavy.hyper.lambda_u = 5000.0;
    CHECK_FALSE(heavy.warnings().empty());
    CHECK(ModelConfig{}.warnings().empty());
  }
}
