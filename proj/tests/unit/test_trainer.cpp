// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include "ddgan/errors.hpp"
#include "ddgan/synth.hpp"
#include "ddgan/trainer.hpp"

#include <doctest.h>

#include <fstream>
#include <iterator>
#include <limits>

using namespace ddgan;
using oracle::Image;

namespace {

ModelConfig tiny(Architecture a = Architecture::dual_dual)
{
  ModelConfig cfg;
  cfg.architecture = a;
  cfg.generator.depth = 1;
  cfg.generator.base_channels = 2;
  cfg.generator.max_channels = 4;
  cfg.critic.layers = 2;
  cfg.critic.base_channels = 2;
  cfg.hyper.critic_iters = 2;
  return cfg;
}

std::vector<Sample<double>> tiny_samples(std::size_t n = 3, std::uint64_t seed = 5)
{
  SynthConfig sc;
  sc.samples = 64;
  return prepare_samples<double>(synthesize_dataset(n, seed, sc), 1);
}

Var<double> c(Tensor<double> const &t) { return Var<double>::constant(t); }

Image g_of(Generator<double> const &g, Image const &x) { return oracle::generator(const_cast<Generator<double> &>(g), x); }
double d_of(Critic<double> const &d, Image const &x) { return oracle::critic(const_cast<Critic<double> &>(d), x); }

std::vector<Tensor<double>> values(std::vector<Var<double>> const &params)
{
  std::vector<Tensor<double>> out;
  for (auto const &p : params) out.push_back(p.value());
  return out;
}

bool same(std::vector<Tensor<double>> const &a, std::vector<Tensor<double>> const &b)
{
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].shape() != b[i].shape() || !(a[i].data() == b[i].data()).all()) return false;
  }
  return true;
}

std::string lookup(KeyValues const &kv, std::string const &key)
{
  for (auto const &[k, v] : kv)
    if (k == key) return v;
  return "<missing>";
}

std::string slurp(std::filesystem::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_SUITE("losses")
{
  TEST_CASE("default hyperparameters")
  {
    Hyperparameters h;
    CHECK(h.lambda_u == 500.0);
    CHECK(h.lambda_v == 500.0);
    CHECK(h.lambda_o == 500.0);
    CHECK(h.critic_iters == 5);
    CHECK(h.batch_size == 1);
    CHECK(h.learning_rate == 2e-4);
    CHECK(h.clip == 0.01);
    CHECK(h.rms_decay == 0.9);
    CHECK(h.detach_large_cycle);
  }

  TEST_CASE("dual-dual losses match the network oracles")
  {
    Model<double> m(tiny(), 3);
    auto const s = tiny_samples(1).front();
    Image const u(s.u), v(s.v), o(s.o);
    auto const &l0 = m.loop(0);
    auto const &l1 = m.loop(1);
    Rng rng(0);

    Image const fake_o = g_of(l0.forward, u), fake_u = g_of(l0.inverse, o);
    double const rec_u = oracle::l1(u, g_of(l0.inverse, fake_o)), rec_o = oracle::l1(o, g_of(l0.forward, fake_u));
    auto const g1 = generator_loss_1(c(s.u), c(s.o), m, Mode::eval, rng);
    CHECK(g1.recon_a == doctest::Approx(rec_u).epsilon(1e-12));
    CHECK(g1.recon_b == doctest::Approx(rec_o).epsilon(1e-12));
    CHECK(g1.total.item() ==
          doctest::Approx(500.0 * rec_u + 500.0 * rec_o - d_of(l0.target_critic, fake_o) - d_of(l0.source_critic, fake_u))
              .epsilon(1e-12));

    Image const x = g_of(l0.forward, fake_u);
    Image const fake_o2 = g_of(l1.forward, v), fake_v = g_of(l1.inverse, x);
    double const rec_v = oracle::l1(v, g_of(l1.inverse, fake_o2)), rec_x = oracle::l1(x, g_of(l1.forward, fake_v));
    auto const g2 = generator_loss_2(c(s.v), c(s.o), m, Mode::eval, rng);
    CHECK(g2.recon_a == doctest::Approx(rec_v).epsilon(1e-12));
    CHECK(g2.recon_b == doctest::Approx(rec_x).epsilon(1e-12));
    CHECK(g2.total.item() ==
          doctest::Approx(500.0 * rec_v + 500.0 * rec_x - d_of(l1.source_critic, fake_v) - d_of(l1.target_critic, fake_o2))
              .epsilon(1e-12));

    auto const cl = critic_losses(c(s.u), c(s.v), c(s.o), m, Mode::eval, rng);
    CHECK(cl[0].item() == doctest::Approx(d_of(l0.target_critic, fake_o) - d_of(l0.target_critic, o)).epsilon(1e-12));
    CHECK(cl[1].item() == doctest::Approx(d_of(l0.source_critic, fake_u) - d_of(l0.source_critic, u)).epsilon(1e-12));
    CHECK(cl[2].item() == doctest::Approx(d_of(l1.target_critic, fake_o2) - d_of(l1.target_critic, x)).epsilon(1e-12));
    CHECK(cl[3].item() == doctest::Approx(d_of(l1.source_critic, fake_v) - d_of(l1.source_critic, v)).epsilon(1e-12));
  }

  TEST_CASE("single-loop losses match the network oracles")
  {
    Model<double> m(tiny(Architecture::single), 4);
    auto const s = tiny_samples(1).front();
    Image const u(s.u), v(s.v);
    auto const &l = m.loop(0);
    Rng rng(0);
    Image const fake_v = g_of(l.forward, u), fake_u = g_of(l.inverse, v);
    double const rec_u = oracle::l1(u, g_of(l.inverse, fake_v)), rec_v = oracle::l1(v, g_of(l.forward, fake_u));
    auto const g = single_generator_loss(c(s.u), c(s.v), m, Mode::eval, rng);
    CHECK(g.total.item() ==
          doctest::Approx(500.0 * rec_u + 500.0 * rec_v - d_of(l.target_critic, fake_v) - d_of(l.source_critic, fake_u))
              .epsilon(1e-12));
    auto const cl = single_critic_losses(c(s.u), c(s.v), m, Mode::eval, rng);
    CHECK(cl[0].item() == doctest::Approx(d_of(l.target_critic, fake_v) - d_of(l.target_critic, v)).epsilon(1e-12));
    CHECK(cl[1].item() == doctest::Approx(d_of(l.source_critic, fake_u) - d_of(l.source_critic, u)).epsilon(1e-12));
  }

  TEST_CASE("an all-zero model on zero signals has zero losses")
  {
    Model<double> m(tiny(), 5);
    for (auto &[name, p] : m.named_parameters()) p.mutable_value().data().setZero();
    Tensor<double> const z(Shape{1, 8, 8});
    Rng rng(0);
    CHECK(generator_loss_1(c(z), c(z), m, Mode::train, rng).total.item() == 0.0);
    CHECK(generator_loss_2(c(z), c(z), m, Mode::train, rng).total.item() == 0.0);
    for (auto const &l : critic_losses(c(z), c(z), c(z), m, Mode::train, rng)) CHECK(l.item() == 0.0);
  }

  TEST_CASE("generators gain by raising the critic score and critics are blind to a constant offset")
  {
    auto cfg = tiny();
    cfg.critic.layers = 1;
    cfg.critic.kernel = 1;
    Model<double> m(cfg, 6);
    auto const s = tiny_samples(1).front();
    Rng rng(0);
    double const g_before = generator_loss_1(c(s.u), c(s.o), m, Mode::eval, rng).total.item();
    double const c_before = critic_losses(c(s.u), c(s.v), c(s.o), m, Mode::eval, rng)[0].item();
    m.loop(0).target_critic.layers()[0].bias.mutable_value()[0] += 0.25;
    m.loop(0).source_critic.layers()[0].bias.mutable_value()[0] += 0.25;
    CHECK(generator_loss_1(c(s.u), c(s.o), m, Mode::eval, rng).total.item() ==
          doctest::Approx(g_before - 0.5).epsilon(1e-12));
    CHECK(critic_losses(c(s.u), c(s.v), c(s.o), m, Mode::eval, rng)[0].item() ==
          doctest::Approx(c_before).epsilon(1e-12));
  }

  TEST_CASE("the large cycle couples the loops in value but not in gradient")
  {
    auto cfg = tiny();
    Model<double> m(cfg, 7);
    auto const s = tiny_samples(1).front();
    Rng rng(0);
    double const before = generator_loss_2(c(s.v), c(s.o), m, Mode::eval, rng).total.item();
    auto &w = m.loop(0).forward.head().bias.mutable_value();
    w[0] += 0.1;
    auto const loss = generator_loss_2(c(s.v), c(s.o), m, Mode::eval, rng);
    CHECK(loss.total.item() != before);
    backward(loss.total);
    for (auto const &p : m.loop(0).generator_parameters()) CHECK(p.grad().data().abs().maxCoeff() == 0.0);
    double loop1 = 0.0;
    for (auto const &p : m.loop(1).generator_parameters()) loop1 += p.grad().data().abs().sum();
    CHECK(loop1 > 0.0);

    cfg.hyper.detach_large_cycle = false;
    Model<double> full(cfg, 7);
    backward(generator_loss_2(c(s.v), c(s.o), full, Mode::eval, rng).total);
    double loop0 = 0.0;
    for (auto const &p : full.loop(0).generator_parameters()) loop0 += p.grad().data().abs().sum();
    CHECK(loop0 > 0.0);
  }
}

TEST_SUITE("training")
{
  TEST_CASE("zero steps leave the initialization untouched")
  {
    auto samples = tiny_samples();
    auto fresh = make_train_state<double>(tiny(), 11);
    auto trained = train(samples, tiny(), 0, 11);
    CHECK(same(snapshot(fresh.model.named_parameters()), snapshot(trained.model.named_parameters())));
    CHECK(trained.step == 0);
  }

  TEST_CASE("identical seeds train bit-identically and different seeds do not")
  {
    auto samples = tiny_samples();
    auto a = train(samples, tiny(), 3, 12), b = train(samples, tiny(), 3, 12), d = train(samples, tiny(), 3, 13);
    CHECK(same(snapshot(a.model.named_parameters()), snapshot(b.model.named_parameters())));
    CHECK_FALSE(same(snapshot(a.model.named_parameters()), snapshot(d.model.named_parameters())));
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.step == 3);
    for (auto const &name : loss_names(Architecture::dual_dual)) CHECK(a.loss_history.at(name).size() == 3);
  }

  TEST_CASE("critic steps clip and touch only critics, generator steps touch only their loop")
  {
    auto samples = tiny_samples();
    auto state = make_train_state<double>(tiny(), 14);
    auto const clip = state.model.config().hyper.clip;
    auto gens0 = values(state.model.loop(0).generator_parameters());
    auto gens1 = values(state.model.loop(1).generator_parameters());
    auto critics = values(state.model.critic_parameters());
    int critic_events = 0, gen_events = 0;
    train(state, samples, 2, {}, [&](Model<double> const &m, UpdateEvent const &e) {
      auto const now0 = values(m.loop(0).generator_parameters());
      auto const now1 = values(m.loop(1).generator_parameters());
      auto const now_c = values(m.critic_parameters());
      if (e.critic) {
        ++critic_events;
        for (auto const &p : m.critic_parameters()) CHECK(p.value().data().abs().maxCoeff() <= clip);
        CHECK(same(now0, gens0));
        CHECK(same(now1, gens1));
        CHECK_FALSE(same(now_c, critics));
      } else {
        ++gen_events;
        CHECK(same(now_c, critics));
        CHECK_FALSE(same(e.loop == 0 ? now0 : now1, e.loop == 0 ? gens0 : gens1));
        CHECK(same(e.loop == 0 ? now1 : now0, e.loop == 0 ? gens1 : gens0));
        for (auto const &p : m.critic_parameters()) CHECK_FALSE(p.has_grad());
      }
      gens0 = now0;
      gens1 = now1;
      critics = now_c;
    });
    CHECK(critic_events == 4);
    CHECK(gen_events == 4);
  }

  TEST_CASE("single-loop baseline trains with the same machinery")
  {
    auto samples = tiny_samples();
    auto s = train_single_dualgan(samples, tiny(), 2, 15);
    CHECK(s.model.loop_count() == 1);
    CHECK(s.loss_history.at("gen_loss").size() == 2);
    auto const report = reconstruction_report(s.model, samples);
    CHECK(report.count("recon_u") == 1);
    CHECK(report.count("recon_v") == 1);
  }

  TEST_CASE("single precision training stays finite")
  {
    SynthConfig sc;
    sc.samples = 64;
    auto samples = prepare_samples<float>(synthesize_dataset(2, 5, sc), 1);
    auto s = train(samples, tiny(), 2, 16);
    for (auto const &[name, p] : s.model.named_parameters()) CHECK(p.value().all_finite());
  }

  TEST_CASE("a non-finite loss aborts with a per-loss dump")
  {
    auto samples = tiny_samples();
    auto state = make_train_state<double>(tiny(), 17);
    state.model.loop(0).forward.head().bias.mutable_value()[0] = std::numeric_limits<double>::quiet_NaN();
    try {
      train(state, samples, 1);
      FAIL("expected NumericalError");
    } catch (NumericalError const &e) {
      std::string const what = e.what();
      CHECK(what.find("gen_loss_1") != std::string::npos);
      CHECK(what.find("recon_u") != std::string::npos);
    }
  }

  TEST_CASE("prepare_samples pads every member to one square")
  {
    SynthConfig sc;
    sc.samples = 60;
    auto pairs = synthesize_dataset(1, 3, sc);
    auto s = prepare_samples<double>(pairs, 2).front();
    CHECK(s.u.shape() == Shape{1, 8, 8});
    CHECK(s.v.shape() == s.u.shape());
    CHECK(s.o.shape() == s.u.shape());
    CHECK(s.u_pad == 64 - pairs[0].u.size());
    CHECK(s.id == pairs[0].v.id);
  }

  TEST_CASE("loss csv rows")
  {
    LossHistory h;
    for (auto const &n : loss_names(Architecture::single)) h[n] = {1.0, 0.5};
    auto const csv = loss_csv(h, Architecture::single);
    CHECK(csv.rfind("step,loss_name,value\ngen_loss,", 0) == std::string::npos);
    CHECK(csv.rfind("step,loss_name,value\n0,gen_loss,1\n0,critic_a,1\n", 0) == 0);
    CHECK(csv.find("1,recon_v,0.5\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
    auto const tail = loss_csv(h, Architecture::single, 1, false);
    CHECK(tail.rfind("1,gen_loss,0.5\n", 0) == 0);
    CHECK(std::count(tail.begin(), tail.end(), '\n') == 5);
  }
}

TEST_SUITE("checkpoints")
{
  TEST_CASE("round trip is bit-exact and re-saving is byte-identical")
  {
    oracle::TempDir dir("ckpt");
    auto samples = tiny_samples();
    auto state = train(samples, tiny(), 2, 21);
    state.info.emplace_back("note", "x");
    save_checkpoint(state, dir / "a.ddgn");
    auto loaded = load_checkpoint<double>(dir / "a.ddgn");
    CHECK(same(snapshot(state.model.named_parameters()), snapshot(loaded.model.named_parameters())));
    CHECK(loaded.step == 2);
    CHECK(loaded.loss_history == state.loss_history);
    CHECK(lookup(loaded.info, "note") == "x");
    save_checkpoint(loaded, dir / "b.ddgn");
    CHECK(slurp(dir / "a.ddgn") == slurp(dir / "b.ddgn"));
    CHECK(lookup(read_checkpoint_metadata(dir / "a.ddgn"), "train.step") == "2");
  }

  TEST_CASE("resuming k steps after k steps equals 2k uninterrupted steps")
  {
    oracle::TempDir dir("resume");
    auto samples = tiny_samples();
    auto straight = train(samples, tiny(), 4, 22);
    auto half = train(samples, tiny(), 2, 22);
    save_checkpoint(half, dir / "half.ddgn");
    auto resumed = load_checkpoint<double>(dir / "half.ddgn");
    train(resumed, samples, 2);
    CHECK(resumed.step == 4);
    CHECK(same(snapshot(straight.model.named_parameters()), snapshot(resumed.model.named_parameters())));
    CHECK(straight.loss_history == resumed.loss_history);
  }

  TEST_CASE("corruption is detected")
  {
    oracle::TempDir dir("corrupt");
    auto state = make_train_state<double>(tiny(), 23);
    save_checkpoint(state, dir / "c.ddgn");
    auto const good = slurp(dir / "c.ddgn");
    auto write = [&](std::string const &bytes) {
      std::ofstream out(dir / "bad.ddgn", std::ios::binary);
      out << bytes;
    };
    auto bad = good;
    bad[0] = 'X';
    write(bad);
    CHECK_THROWS_AS(load_checkpoint<double>(dir / "bad.ddgn"), DataError);
    bad = good;
    bad[bad.size() / 2] = static_cast<char>(bad[bad.size() / 2] ^ 0x40);
    write(bad);
    CHECK_THROWS_AS(load_checkpoint<double>(dir / "bad.ddgn"), DataError);
    write(good.substr(0, good.size() - 3));
    CHECK_THROWS_AS(load_checkpoint<double>(dir / "bad.ddgn"), DataError);
    CHECK_THROWS_AS(load_checkpoint<double>(dir / "missing.ddgn"), DataError);
  }
}
