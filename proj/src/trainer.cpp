// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/trainer.hpp"

#include "ddgan/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ddgan {

template <typename Scalar> std::vector<Sample<Scalar>> prepare_samples(std::vector<PairedExample> const &pairs, int depth)
{
  std::vector<Sample<Scalar>> out;
  out.reserve(pairs.size());
  for (auto const &p : pairs) {
    Index const len = std::max({p.u.size(), p.v.size(), p.o.size()});
    Sample<Scalar> s;
    s.id = p.v.id;
    auto const u = reshape_to_matrix<Scalar>(pad_to_length(p.u, len), depth);
    s.u = u.matrix;
    s.u_pad = u.pad_count + (len - p.u.size());
    s.v = reshape_to_matrix<Scalar>(pad_to_length(p.v, len), depth).matrix;
    s.o = reshape_to_matrix<Scalar>(pad_to_length(p.o, len), depth).matrix;
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Losses

namespace {

template <typename Scalar> Scalar as_scalar(double v) { return static_cast<Scalar>(v); }

template <typename Scalar> double value_of(Var<Scalar> const &v) { return static_cast<double>(v.item()); }

} // namespace

template <typename Scalar>
GeneratorLoss<Scalar> generator_loss_1(Var<Scalar> const &u, Var<Scalar> const &o, Model<Scalar> const &model,
                                       Mode mode, Rng &rng)
{
  auto const &loop = model.loop(0);
  auto const &h = model.config().hyper;
  auto const fake_o = loop.forward.forward(u, mode, rng);
  auto const cycle_u = loop.inverse.forward(fake_o, mode, rng);
  auto const fake_u = loop.inverse.forward(o, mode, rng);
  auto const cycle_o = loop.forward.forward(fake_u, mode, rng);
  auto const rec_u = l1_distance(u, cycle_u);
  auto const rec_o = l1_distance(o, cycle_o);
  GeneratorLoss<Scalar> out;
  out.total = as_scalar<Scalar>(h.lambda_u) * rec_u + as_scalar<Scalar>(h.lambda_o) * rec_o -
              loop.target_critic.score(fake_o) - loop.source_critic.score(fake_u);
  out.recon_a = value_of(rec_u);
  out.recon_b = value_of(rec_o);
  return out;
}

template <typename Scalar>
GeneratorLoss<Scalar> generator_loss_2(Var<Scalar> const &v, Var<Scalar> const &o, Model<Scalar> const &model,
                                       Mode mode, Rng &rng)
{
  auto const &first = model.loop(0);
  auto const &loop = model.loop(1);
  auto const &h = model.config().hyper;
  auto x = first.forward.forward(first.inverse.forward(o, mode, rng), mode, rng);
  if (h.detach_large_cycle) x = x.detach();
  auto const fake_o = loop.forward.forward(v, mode, rng);
  auto const cycle_v = loop.inverse.forward(fake_o, mode, rng);
  auto const fake_v = loop.inverse.forward(x, mode, rng);
  auto const cycle_x = loop.forward.forward(fake_v, mode, rng);
  auto const rec_v = l1_distance(v, cycle_v);
  auto const rec_x = l1_distance(x, cycle_x);
  GeneratorLoss<Scalar> out;
  out.total = as_scalar<Scalar>(h.lambda_v) * rec_v + as_scalar<Scalar>(h.lambda_o) * rec_x -
              loop.source_critic.score(fake_v) - loop.target_critic.score(fake_o);
  out.recon_a = value_of(rec_v);
  out.recon_b = value_of(rec_x);
  return out;
}

template <typename Scalar>
std::array<Var<Scalar>, 4> critic_losses(Var<Scalar> const &u, Var<Scalar> const &v, Var<Scalar> const &o,
                                         Model<Scalar> const &model, Mode mode, Rng &rng)
{
  auto const &first = model.loop(0);
  auto const &second = model.loop(1);
  auto const fake_o1 = first.forward.forward(u, mode, rng).detach();
  auto const fake_u = first.inverse.forward(o, mode, rng);
  auto const x = first.forward.forward(fake_u, mode, rng).detach();
  auto const fake_o2 = second.forward.forward(v, mode, rng).detach();
  auto const fake_v = second.inverse.forward(x, mode, rng).detach();
  return {first.target_critic.score(fake_o1) - first.target_critic.score(o),
          first.source_critic.score(fake_u.detach()) - first.source_critic.score(u),
          second.target_critic.score(fake_o2) - second.target_critic.score(x),
          second.source_critic.score(fake_v) - second.source_critic.score(v)};
}

template <typename Scalar>
GeneratorLoss<Scalar> single_generator_loss(Var<Scalar> const &u, Var<Scalar> const &v, Model<Scalar> const &model,
                                            Mode mode, Rng &rng)
{
  auto const &loop = model.loop(0);
  auto const &h = model.config().hyper;
  auto const fake_v = loop.forward.forward(u, mode, rng);
  auto const cycle_u = loop.inverse.forward(fake_v, mode, rng);
  auto const fake_u = loop.inverse.forward(v, mode, rng);
  auto const cycle_v = loop.forward.forward(fake_u, mode, rng);
  auto const rec_u = l1_distance(u, cycle_u);
  auto const rec_v = l1_distance(v, cycle_v);
  GeneratorLoss<Scalar> out;
  out.total = as_scalar<Scalar>(h.lambda_u) * rec_u + as_scalar<Scalar>(h.lambda_v) * rec_v -
              loop.target_critic.score(fake_v) - loop.source_critic.score(fake_u);
  out.recon_a = value_of(rec_u);
  out.recon_b = value_of(rec_v);
  return out;
}

template <typename Scalar>
std::array<Var<Scalar>, 2> single_critic_losses(Var<Scalar> const &u, Var<Scalar> const &v, Model<Scalar> const &model,
                                                Mode mode, Rng &rng)
{
  auto const &loop = model.loop(0);
  auto const fake_v = loop.forward.forward(u, mode, rng).detach();
  auto const fake_u = loop.inverse.forward(v, mode, rng).detach();
  return {loop.target_critic.score(fake_v) - loop.target_critic.score(v),
          loop.source_critic.score(fake_u) - loop.source_critic.score(u)};
}

// ---------------------------------------------------------------------------
// Training

std::vector<std::string> loss_names(Architecture a)
{
  if (a == Architecture::single) return {"gen_loss", "critic_a", "critic_b", "recon_u", "recon_v"};
  return {"gen_loss_1", "gen_loss_2", "critic_a", "critic_b", "critic_c", "critic_d",
          "recon_u",    "recon_o1",   "recon_v",  "recon_o2"};
}

template <typename Scalar> TrainState<Scalar> make_train_state(ModelConfig const &cfg, std::uint64_t seed)
{
  TrainState<Scalar> s;
  s.model = Model<Scalar>(cfg, seed);
  s.seed = seed;
  s.rng = Rng(mix_seed(seed, 0x7261696eULL));
  typename RmsProp<Scalar>::Options const opts{cfg.hyper.learning_rate, cfg.hyper.rms_decay, cfg.hyper.rms_eps};
  s.critic_optimizer = RmsProp<Scalar>(s.model.critic_parameters(), opts);
  for (std::size_t i = 0; i < s.model.loop_count(); ++i) {
    s.generator_optimizers.emplace_back(s.model.loop(i).generator_parameters(), opts);
  }
  for (auto const &name : loss_names(cfg.architecture)) s.loss_history[name];
  return s;
}

namespace {

template <typename Scalar> struct Batch
{
  std::vector<Sample<Scalar> const *> items;
};

template <typename Scalar> Batch<Scalar> draw(std::vector<Sample<Scalar>> const &samples, int size, Rng &rng)
{
  Batch<Scalar> b;
  for (int i = 0; i < size; ++i) b.items.push_back(&samples[rng.below(samples.size())]);
  return b;
}

template <typename Scalar> Var<Scalar> constant(Tensor<Scalar> const &t) { return Var<Scalar>::constant(t); }

template <typename Scalar> Var<Scalar> accumulate(Var<Scalar> const &acc, Var<Scalar> const &term)
{
  return acc ? acc + term : term;
}

template <typename Scalar> void check_finite(std::int64_t step, StepLosses const &losses, Model<Scalar> const &model)
{
  bool bad = false;
  for (auto const &[name, value] : losses) bad = bad || !std::isfinite(value);
  for (auto const &[name, p] : model.named_parameters()) bad = bad || !p.value().all_finite();
  if (!bad) return;
  std::ostringstream msg;
  msg << "non-finite value at step " << step << ":";
  for (auto const &[name, value] : losses) msg << "\n  " << name << " = " << value;
  for (auto const &[name, p] : model.named_parameters()) {
    if (!p.value().all_finite()) msg << "\n  parameter " << name << " is non-finite";
  }
  throw NumericalError(msg.str());
}

template <typename Scalar> void critic_update(TrainState<Scalar> &s, Var<Scalar> const &loss)
{
  s.critic_optimizer.zero_grad();
  backward(loss);
  s.critic_optimizer.step();
  auto params = s.model.critic_parameters();
  clip_weights<Scalar>(params, static_cast<Scalar>(s.model.config().hyper.clip));
}

template <typename Scalar> void generator_update(TrainState<Scalar> &s, std::size_t loop, Var<Scalar> const &loss)
{
  auto &opt = s.generator_optimizers[loop];
  opt.zero_grad();
  backward(loss);
  opt.step();
  // The adversarial terms also reach the critics; drop those gradients.
  for (auto &p : s.model.critic_parameters()) p.zero_grad();
}

template <typename Scalar>
void notify(UpdateObserver<Scalar> const &on_update, Model<Scalar> const &model, UpdateEvent const &event)
{
  if (on_update) on_update(model, event);
}

template <typename Scalar>
StepLosses dual_dual_step(TrainState<Scalar> &s, std::vector<Sample<Scalar>> const &samples,
                          UpdateObserver<Scalar> const &on_update)
{
  auto const &h = s.model.config().hyper;
  Scalar const inv_m = Scalar(1) / static_cast<Scalar>(h.batch_size);
  std::array<double, 4> critic_values{};
  for (int it = 0; it < h.critic_iters; ++it) {
    auto const batch = draw(samples, h.batch_size, s.rng);
    std::array<Var<Scalar>, 4> sums;
    for (auto const *ex : batch.items) {
      auto const terms = critic_losses(constant(ex->u), constant(ex->v), constant(ex->o), s.model, Mode::train, s.rng);
      for (std::size_t k = 0; k < 4; ++k) sums[k] = accumulate(sums[k], terms[k]);
    }
    Var<Scalar> total;
    for (std::size_t k = 0; k < 4; ++k) {
      sums[k] = scale(sums[k], inv_m);
      critic_values[k] = value_of(sums[k]);
      total = accumulate(total, sums[k]);
    }
    critic_update(s, total);
    notify(on_update, s.model, {true, 0, it});
  }

  auto const batch = draw(samples, h.batch_size, s.rng);
  Var<Scalar> loss1;
  double rec_u = 0.0, rec_o1 = 0.0;
  for (auto const *ex : batch.items) {
    auto const l = generator_loss_1(constant(ex->u), constant(ex->o), s.model, Mode::train, s.rng);
    loss1 = accumulate(loss1, l.total);
    rec_u += l.recon_a;
    rec_o1 += l.recon_b;
  }
  loss1 = scale(loss1, inv_m);
  double const gen1 = value_of(loss1);
  generator_update(s, 0, loss1);
  notify(on_update, s.model, {false, 0, 0});

  Var<Scalar> loss2;
  double rec_v = 0.0, rec_o2 = 0.0;
  for (auto const *ex : batch.items) {
    auto const l = generator_loss_2(constant(ex->v), constant(ex->o), s.model, Mode::train, s.rng);
    loss2 = accumulate(loss2, l.total);
    rec_v += l.recon_a;
    rec_o2 += l.recon_b;
  }
  loss2 = scale(loss2, inv_m);
  double const gen2 = value_of(loss2);
  generator_update(s, 1, loss2);
  // Full backflow through the large cycle also reaches the U <-> O generators.
  if (!h.detach_large_cycle) {
    for (auto &p : s.model.loop(0).generator_parameters()) p.zero_grad();
  }
  notify(on_update, s.model, {false, 1, 0});

  double const m = h.batch_size;
  return {{"gen_loss_1", gen1},          {"gen_loss_2", gen2},         {"critic_a", critic_values[0]},
          {"critic_b", critic_values[1]}, {"critic_c", critic_values[2]}, {"critic_d", critic_values[3]},
          {"recon_u", rec_u / m},         {"recon_o1", rec_o1 / m},     {"recon_v", rec_v / m},
          {"recon_o2", rec_o2 / m}};
}

template <typename Scalar>
StepLosses single_step(TrainState<Scalar> &s, std::vector<Sample<Scalar>> const &samples,
                       UpdateObserver<Scalar> const &on_update)
{
  auto const &h = s.model.config().hyper;
  Scalar const inv_m = Scalar(1) / static_cast<Scalar>(h.batch_size);
  std::array<double, 2> critic_values{};
  for (int it = 0; it < h.critic_iters; ++it) {
    auto const batch = draw(samples, h.batch_size, s.rng);
    std::array<Var<Scalar>, 2> sums;
    for (auto const *ex : batch.items) {
      auto const terms = single_critic_losses(constant(ex->u), constant(ex->v), s.model, Mode::train, s.rng);
      for (std::size_t k = 0; k < 2; ++k) sums[k] = accumulate(sums[k], terms[k]);
    }
    Var<Scalar> total;
    for (std::size_t k = 0; k < 2; ++k) {
      sums[k] = scale(sums[k], inv_m);
      critic_values[k] = value_of(sums[k]);
      total = accumulate(total, sums[k]);
    }
    critic_update(s, total);
    notify(on_update, s.model, {true, 0, it});
  }
  auto const batch = draw(samples, h.batch_size, s.rng);
  Var<Scalar> loss;
  double rec_u = 0.0, rec_v = 0.0;
  for (auto const *ex : batch.items) {
    auto const l = single_generator_loss(constant(ex->u), constant(ex->v), s.model, Mode::train, s.rng);
    loss = accumulate(loss, l.total);
    rec_u += l.recon_a;
    rec_v += l.recon_b;
  }
  loss = scale(loss, inv_m);
  double const gen = value_of(loss);
  generator_update(s, 0, loss);
  notify(on_update, s.model, {false, 0, 0});
  double const m = h.batch_size;
  return {{"gen_loss", gen},
          {"critic_a", critic_values[0]},
          {"critic_b", critic_values[1]},
          {"recon_u", rec_u / m},
          {"recon_v", rec_v / m}};
}

} // namespace

template <typename Scalar>
void train(TrainState<Scalar> &state, std::vector<Sample<Scalar>> const &samples, std::int64_t steps,
           std::type_identity_t<StepObserver<Scalar>> const &observer,
           std::type_identity_t<UpdateObserver<Scalar>> const &on_update)
{
  if (steps < 0) throw ConfigError("steps must be non-negative");
  if (steps > 0 && samples.empty()) throw DataError("train: empty dataset");
  state.model.config().validate();
  for (auto const &s : samples) state.model.loop(0).forward.check_input(s.u.shape());
  bool const single = state.model.architecture() == Architecture::single;
  for (std::int64_t i = 0; i < steps; ++i) {
    StepLosses const losses = single ? single_step(state, samples, on_update) : dual_dual_step(state, samples, on_update);
    check_finite(state.step, losses, state.model);
    for (auto const &[name, value] : losses) state.loss_history[name].push_back(value);
    ++state.step;
    if (observer) observer(state, losses);
  }
}

template <typename Scalar>
TrainState<Scalar> train(std::vector<Sample<Scalar>> const &samples, ModelConfig const &cfg, std::int64_t steps,
                         std::uint64_t seed)
{
  auto state = make_train_state<Scalar>(cfg, seed);
  train(state, samples, steps);
  return state;
}

template <typename Scalar>
TrainState<Scalar> train_single_dualgan(std::vector<Sample<Scalar>> const &samples, ModelConfig cfg,
                                        std::int64_t steps, std::uint64_t seed)
{
  cfg.architecture = Architecture::single;
  return train(samples, cfg, steps, seed);
}

template <typename Scalar>
std::map<std::string, double> reconstruction_report(Model<Scalar> const &model,
                                                    std::vector<Sample<Scalar>> const &samples)
{
  std::map<std::string, double> out;
  if (samples.empty()) return out;
  Rng rng;
  auto add = [&](char const *name, double v) { out[name] += v / static_cast<double>(samples.size()); };
  for (auto const &ex : samples) {
    if (model.architecture() == Architecture::single) {
      auto const l = single_generator_loss(constant(ex.u), constant(ex.v), model, Mode::eval, rng);
      add("recon_u", l.recon_a);
      add("recon_v", l.recon_b);
    } else {
      auto const l1 = generator_loss_1(constant(ex.u), constant(ex.o), model, Mode::eval, rng);
      auto const l2 = generator_loss_2(constant(ex.v), constant(ex.o), model, Mode::eval, rng);
      add("recon_u", l1.recon_a);
      add("recon_o1", l1.recon_b);
      add("recon_v", l2.recon_a);
      add("recon_o2", l2.recon_b);
    }
  }
  return out;
}

std::string loss_csv(LossHistory const &history, Architecture a, std::int64_t from_step, bool header)
{
  std::string out = header ? "step,loss_name,value\n" : "";
  auto const names = loss_names(a);
  std::size_t steps = 0;
  for (auto const &n : names) {
    auto it = history.find(n);
    if (it != history.end()) steps = std::max(steps, it->second.size());
  }
  char buf[96];
  for (auto i = static_cast<std::size_t>(std::max<std::int64_t>(0, from_step)); i < steps; ++i) {
    for (auto const &n : names) {
      auto it = history.find(n);
      if (it == history.end() || i >= it->second.size()) continue;
      std::snprintf(buf, sizeof buf, "%zu,%s,%.17g\n", i, n.c_str(), it->second[i]);
      out += buf;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

template <typename Scalar> Eigen::VectorXd translate_signal(Model<Scalar> const &model, Sample<Scalar> const &sample)
{
  Rng rng;
  auto const out = model.translate(constant(sample.u), Mode::eval, rng);
  return unreshape(out.value(), sample.u_pad);
}

template <typename Scalar>
EvalReport translation_accuracy(Model<Scalar> const &model, std::vector<Sample<Scalar>> const &samples,
                                std::vector<PairedExample> const &pairs, MelCepstrumConfig const &mel)
{
  if (samples.size() != pairs.size()) throw std::invalid_argument("translation_accuracy: samples and pairs differ");
  if (samples.empty()) throw DataError("translation_accuracy: empty test set");
  std::vector<Eigen::VectorXd> outputs;
  std::vector<SignalRecord> refs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    outputs.push_back(translate_signal(model, samples[i]));
    refs.push_back(pairs[i].v);
  }
  return score_translations(outputs, refs, mel);
}

// ---------------------------------------------------------------------------
// Proportion sweep

std::vector<SweepRow> proportion_sweep(std::vector<PairedExample> const &pairs, ModelConfig const &cfg,
                                       SweepOptions const &opts)
{
  if (pairs.empty()) throw DataError("proportion_sweep: empty dataset");
  if (opts.proportions.empty()) throw ConfigError("proportion_sweep: no proportions given");
  std::vector<SweepRow> rows;
  for (double rho : opts.proportions) {
    std::vector<PairedExample> recut;
    recut.reserve(pairs.size());
    for (auto const &p : pairs) recut.push_back(make_pair(p.u, p.v, rho, p.group_label));
    auto const samples = prepare_samples<double>(recut, cfg.generator.depth);
    auto const state = train(samples, cfg, opts.steps, opts.seed);
    auto const report = translation_accuracy(state.model, samples, recut);
    rows.push_back({rho, report.accuracy, opts.seed});
  }
  return rows;
}

std::string sweep_csv(std::vector<SweepRow> const &rows)
{
  std::string out = "rho,accuracy,seed\n";
  char buf[96];
  for (auto const &r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%llu\n", r.rho, r.accuracy, static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  out += "# published reference accuracy (not comparable, not asserted): rho=0.200000 0.63\n";
  out += "# published reference accuracy (not comparable, not asserted): rho=0.400000 0.82\n";
  out += "# published reference accuracy (not comparable, not asserted): rho=0.600000 0.95 (reported optimum)\n";
  return out;
}

// ---------------------------------------------------------------------------
// Instantiations

#define DDGAN_INSTANTIATE(S)                                                                                           \
  template std::vector<Sample<S>> prepare_samples<S>(std::vector<PairedExample> const &, int);                       \
  template GeneratorLoss<S> generator_loss_1<S>(Var<S> const &, Var<S> const &, Model<S> const &, Mode, Rng &);       \
  template GeneratorLoss<S> generator_loss_2<S>(Var<S> const &, Var<S> const &, Model<S> const &, Mode, Rng &);       \
  template std::array<Var<S>, 4> critic_losses<S>(Var<S> const &, Var<S> const &, Var<S> const &, Model<S> const &,  \
                                                  Mode, Rng &);                                                      \
  template GeneratorLoss<S> single_generator_loss<S>(Var<S> const &, Var<S> const &, Model<S> const &, Mode, Rng &);  \
  template std::array<Var<S>, 2> single_critic_losses<S>(Var<S> const &, Var<S> const &, Model<S> const &, Mode,     \
                                                         Rng &);                                                     \
  template TrainState<S> make_train_state<S>(ModelConfig const &, std::uint64_t);                                    \
  template void train<S>(TrainState<S> &, std::vector<Sample<S>> const &, std::int64_t, StepObserver<S> const &,     \
                         UpdateObserver<S> const &);                                                                \
  template TrainState<S> train<S>(std::vector<Sample<S>> const &, ModelConfig const &, std::int64_t, std::uint64_t); \
  template TrainState<S> train_single_dualgan<S>(std::vector<Sample<S>> const &, ModelConfig, std::int64_t,          \
                                                 std::uint64_t);                                                     \
  template std::map<std::string, double> reconstruction_report<S>(Model<S> const &, std::vector<Sample<S>> const &); \
  template Eigen::VectorXd translate_signal<S>(Model<S> const &, Sample<S> const &);                                  \
  template EvalReport translation_accuracy<S>(Model<S> const &, std::vector<Sample<S>> const &,                      \
                                              std::vector<PairedExample> const &, MelCepstrumConfig const &);

DDGAN_INSTANTIATE(double)
DDGAN_INSTANTIATE(float)
#undef DDGAN_INSTANTIATE

template struct TrainState<double>;
template struct TrainState<float>;

} // namespace ddgan
