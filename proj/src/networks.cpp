// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/networks.hpp"

#include "ddgan/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ddgan {

namespace {

template <typename Scalar>
Var<Scalar> random_kernel(Shape shape, Index fan_in, double stddev_gain, Rng &rng)
{
  double const stddev = stddev_gain / std::sqrt(static_cast<double>(fan_in));
  Tensor<Scalar> t(std::move(shape));
  for (Index i = 0; i < t.size(); ++i) t[i] = static_cast<Scalar>(stddev * rng.normal());
  return Var<Scalar>::parameter(std::move(t));
}

template <typename Scalar> Var<Scalar> zero_bias(Index channels)
{
  return Var<Scalar>::parameter(Tensor<Scalar>(Shape{channels}));
}

template <typename Scalar> void append(NamedParameters<Scalar> &out, std::string const &prefix, ConvLayer<Scalar> const &l)
{
  out.emplace_back(prefix + l.name + ".weight", l.weight);
  out.emplace_back(prefix + l.name + ".bias", l.bias);
}

template <typename Scalar> std::vector<Var<Scalar>> values_of(NamedParameters<Scalar> const &named)
{
  std::vector<Var<Scalar>> out;
  out.reserve(named.size());
  for (auto const &[n, p] : named) out.push_back(p);
  return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Configurations

int GeneratorConfig::channels(int stage) const
{
  long const c = static_cast<long>(base_channels) << stage;
  return static_cast<int>(std::min<long>(c, max_channels));
}

std::vector<std::string> GeneratorConfig::problems() const
{
  std::vector<std::string> p;
  if (depth < 1 || depth > 12) p.push_back("generator.depth must lie in [1, 12]");
  if (kernel < 1 || kernel % 2 == 0) p.push_back("generator.kernel must be a positive odd number");
  if (conv_stride != 1) p.push_back("generator.conv_stride must be 1 (pooling does the down-sampling)");
  if (pool_stride != 2) p.push_back("generator.pool_stride must be 2");
  if (!(activation_slope >= 0.0 && activation_slope < 1.0)) p.push_back("generator.activation_slope must lie in [0, 1)");
  if (!(decoder_slope >= 0.0 && decoder_slope < 1.0)) p.push_back("generator.decoder_slope must lie in [0, 1)");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) p.push_back("generator.dropout_rate must lie in [0, 1)");
  if (base_channels < 1) p.push_back("generator.base_channels must be >= 1");
  if (max_channels < base_channels) p.push_back("generator.max_channels must be >= base_channels");
  return p;
}

void GeneratorConfig::validate() const
{
  if (auto p = problems(); !p.empty()) throw ConfigError::from(p);
}

int CriticConfig::channels(int layer) const
{
  if (layer == layers - 1) return 1;
  long const c = static_cast<long>(base_channels) << layer;
  return static_cast<int>(std::min<long>(c, max_channels));
}

std::vector<std::string> CriticConfig::problems() const
{
  std::vector<std::string> p;
  if (layers < 1 || layers > 16) p.push_back("critic.layers must lie in [1, 16]");
  if (kernel < 1 || kernel % 2 == 0) p.push_back("critic.kernel must be a positive odd number");
  if (stride < 1) p.push_back("critic.stride must be >= 1");
  if (base_channels < 1) p.push_back("critic.base_channels must be >= 1");
  if (max_channels < base_channels) p.push_back("critic.max_channels must be >= base_channels");
  if (!(activation_slope >= 0.0 && activation_slope < 1.0)) p.push_back("critic.activation_slope must lie in [0, 1)");
  return p;
}

void CriticConfig::validate() const
{
  if (auto p = problems(); !p.empty()) throw ConfigError::from(p);
}

// ---------------------------------------------------------------------------
// Generator

template <typename Scalar>
Generator<Scalar>::Generator(GeneratorConfig cfg, std::uint64_t seed)
  : cfg_(cfg)
{
  cfg_.validate();
  Index const k = cfg_.kernel;
  // He initialisation for leaky units.
  double const gain = std::sqrt(2.0 / (1.0 + cfg_.activation_slope * cfg_.activation_slope));
  std::uint64_t stream = 0;
  for (int s = 0; s < cfg_.depth; ++s) {
    Index const in = s == 0 ? 1 : cfg_.channels(s - 1);
    Index const out = cfg_.channels(s);
    Rng rng(mix_seed(seed, stream++));
    encoder_.push_back({"enc" + std::to_string(s), random_kernel<Scalar>({out, in, k, k}, in * k * k, gain, rng),
                        zero_bias<Scalar>(out)});
  }
  decoder_.resize(static_cast<std::size_t>(cfg_.depth));
  for (int s = cfg_.depth - 1; s >= 0; --s) {
    Index const below = s == cfg_.depth - 1 ? cfg_.channels(s) : cfg_.channels(s + 1);
    Index const in = below + cfg_.channels(s);
    Index const out = cfg_.channels(s);
    Rng rng(mix_seed(seed, stream++));
    // Transposed-conv kernels are [in, out, k, k]; fan-in per output is in*k*k.
    decoder_[static_cast<std::size_t>(s)] = {"dec" + std::to_string(s),
                                             random_kernel<Scalar>({in, out, k, k}, in * k * k, gain, rng),
                                             zero_bias<Scalar>(out)};
  }
  Rng rng(mix_seed(seed, stream++));
  Index const c0 = cfg_.channels(0);
  head_ = {"head", random_kernel<Scalar>({1, c0, k, k}, c0 * k * k, 1.0, rng), zero_bias<Scalar>(1)};
}

template <typename Scalar> void Generator<Scalar>::check_input(Shape const &shape) const
{
  if (shape.size() != 3 || shape[0] != 1) {
    throw ShapeError("generator input must be [1,H,W], got " + to_string(shape));
  }
  Index const m = cfg_.side_multiple();
  for (int axis = 1; axis <= 2; ++axis) {
    Index const side = shape[static_cast<std::size_t>(axis)];
    if (side % m != 0) {
      Index const need = (side + m - 1) / m * m;
      throw ShapeError("generator of depth " + std::to_string(cfg_.depth) + " needs sides divisible by " +
                       std::to_string(m) + "; pad side " + std::to_string(side) + " by " +
                       std::to_string(need - side) + " to " + std::to_string(need));
    }
  }
}

template <typename Scalar> Var<Scalar> Generator<Scalar>::forward(Var<Scalar> const &x, Mode mode, Rng &rng) const
{
  check_input(x.shape());
  Index const pad = cfg_.kernel / 2;
  auto const slope = static_cast<Scalar>(cfg_.activation_slope);
  auto const up_slope = static_cast<Scalar>(cfg_.decoder_slope);

  std::vector<Var<Scalar>> skips;
  skips.reserve(encoder_.size());
  Var<Scalar> h = x;
  for (auto const &layer : encoder_) {
    h = leaky_relu(add_bias(conv2d(h, layer.weight, 1, pad), layer.bias), slope);
    skips.push_back(h);
    h = maxpool2(h);
  }
  for (int s = cfg_.depth - 1; s >= 0; --s) {
    auto const &layer = decoder_[static_cast<std::size_t>(s)];
    h = concat_channels(upsample2(h), skips[static_cast<std::size_t>(s)]);
    h = leaky_relu(add_bias(conv2d_transposed(h, layer.weight, 1, pad), layer.bias), up_slope);
    h = dropout(h, cfg_.dropout_rate, rng, mode);
  }
  return tanh(add_bias(conv2d(h, head_.weight, 1, pad), head_.bias));
}

template <typename Scalar> NamedParameters<Scalar> Generator<Scalar>::named_parameters() const
{
  NamedParameters<Scalar> out;
  for (auto const &l : encoder_) append(out, "", l);
  for (int s = cfg_.depth - 1; s >= 0; --s) append(out, "", decoder_[static_cast<std::size_t>(s)]);
  append(out, "", head_);
  return out;
}

template <typename Scalar> std::vector<Var<Scalar>> Generator<Scalar>::parameters() const
{
  return values_of(named_parameters());
}

template <typename Scalar> Index Generator<Scalar>::parameter_count() const
{
  Index n = 0;
  for (auto const &[name, p] : named_parameters()) n += p.size();
  return n;
}

// ---------------------------------------------------------------------------
// Critic

template <typename Scalar>
Critic<Scalar>::Critic(CriticConfig cfg, std::uint64_t seed)
  : cfg_(cfg)
{
  cfg_.validate();
  Index const k = cfg_.kernel;
  for (int l = 0; l < cfg_.layers; ++l) {
    Index const in = l == 0 ? 1 : cfg_.channels(l - 1);
    Index const out = cfg_.channels(l);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(l)));
    // Small fixed-scale init; weights are clipped during training anyway.
    double const gain = 0.02 * std::sqrt(static_cast<double>(in * k * k));
    layers_.push_back({"conv" + std::to_string(l), random_kernel<Scalar>({out, in, k, k}, in * k * k, gain, rng),
                       zero_bias<Scalar>(out)});
  }
}

template <typename Scalar> Var<Scalar> Critic<Scalar>::patch_map(Var<Scalar> const &x) const
{
  if (x.shape().size() != 3 || x.shape()[0] != 1) {
    throw ShapeError("critic input must be [1,H,W], got " + to_string(x.shape()));
  }
  Index const pad = cfg_.kernel / 2;
  auto const slope = static_cast<Scalar>(cfg_.activation_slope);
  Var<Scalar> h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    h = add_bias(conv2d(h, layers_[l].weight, cfg_.stride, pad), layers_[l].bias);
    if (l + 1 < layers_.size()) h = leaky_relu(h, slope);
  }
  return h;
}

template <typename Scalar> Var<Scalar> Critic<Scalar>::score(Var<Scalar> const &x) const
{
  return mean(patch_map(x));
}

template <typename Scalar> NamedParameters<Scalar> Critic<Scalar>::named_parameters() const
{
  NamedParameters<Scalar> out;
  for (auto const &l : layers_) append(out, "", l);
  return out;
}

template <typename Scalar> std::vector<Var<Scalar>> Critic<Scalar>::parameters() const
{
  return values_of(named_parameters());
}

// ---------------------------------------------------------------------------
// Model

std::string to_string(Architecture a)
{
  return a == Architecture::dual_dual ? "dual_dual" : "single";
}

Architecture parse_architecture(std::string const &text)
{
  if (text == "dual_dual") return Architecture::dual_dual;
  if (text == "single") return Architecture::single;
  throw ConfigError("unknown architecture '" + text + "' (expected dual_dual or single)");
}

std::vector<std::string> ModelConfig::problems() const
{
  auto p = generator.problems();
  auto c = critic.problems();
  p.insert(p.end(), c.begin(), c.end());
  auto const &h = hyper;
  if (!(h.lambda_u > 0) || !(h.lambda_v > 0) || !(h.lambda_o > 0)) p.push_back("model.lambda_* must be positive");
  if (h.critic_iters < 1) p.push_back("model.critic_iters must be >= 1");
  if (h.batch_size < 1) p.push_back("model.batch_size must be >= 1");
  if (!(h.learning_rate > 0)) p.push_back("model.learning_rate must be positive");
  if (!(h.clip > 0)) p.push_back("model.clip must be positive");
  if (!(h.rms_decay >= 0 && h.rms_decay < 1)) p.push_back("model.rms_decay must lie in [0, 1)");
  if (!(h.rms_eps > 0)) p.push_back("model.rms_eps must be positive");
  return p;
}

std::vector<std::string> ModelConfig::warnings() const
{
  std::vector<std::string> w;
  auto check = [&](char const *name, double v) {
    if (v < 100.0 || v > 1000.0) w.push_back(std::string(name) + " = " + std::to_string(v) + " is outside [100, 1000]");
  };
  check("lambda_u", hyper.lambda_u);
  check("lambda_v", hyper.lambda_v);
  if (architecture == Architecture::dual_dual) check("lambda_o", hyper.lambda_o);
  return w;
}

void ModelConfig::validate() const
{
  if (auto p = problems(); !p.empty()) throw ConfigError::from(p);
}

template <typename Scalar> std::vector<Var<Scalar>> DualGan<Scalar>::generator_parameters() const
{
  auto a = forward.parameters();
  auto b = inverse.parameters();
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

template <typename Scalar> std::vector<Var<Scalar>> DualGan<Scalar>::critic_parameters() const
{
  auto a = target_critic.parameters();
  auto b = source_critic.parameters();
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

template <typename Scalar>
Model<Scalar>::Model(ModelConfig cfg, std::uint64_t seed)
  : cfg_(std::move(cfg))
{
  cfg_.validate();
  auto make_loop = [&](std::string src, std::string tgt, std::string target_critic_name,
                       std::string source_critic_name, std::uint64_t stream) {
    DualGan<Scalar> loop;
    loop.source = src;
    loop.target = tgt;
    loop.forward_name = "gen." + src + "_to_" + tgt;
    loop.inverse_name = "gen." + tgt + "_to_" + src;
    loop.target_critic_name = std::move(target_critic_name);
    loop.source_critic_name = std::move(source_critic_name);
    loop.forward = Generator<Scalar>(cfg_.generator, mix_seed(seed, 4 * stream + 0));
    loop.inverse = Generator<Scalar>(cfg_.generator, mix_seed(seed, 4 * stream + 1));
    loop.target_critic = Critic<Scalar>(cfg_.critic, mix_seed(seed, 4 * stream + 2));
    loop.source_critic = Critic<Scalar>(cfg_.critic, mix_seed(seed, 4 * stream + 3));
    return loop;
  };
  if (cfg_.architecture == Architecture::dual_dual) {
    loops_.push_back(make_loop("u", "o", "critic.o1", "critic.u", 0));
    loops_.push_back(make_loop("v", "o", "critic.o2", "critic.v", 1));
  } else {
    loops_.push_back(make_loop("u", "v", "critic.v", "critic.u", 0));
  }
}

template <typename Scalar> Var<Scalar> Model<Scalar>::translate(Var<Scalar> const &u, Mode mode, Rng &rng) const
{
  if (cfg_.architecture == Architecture::single) return loops_[0].forward.forward(u, mode, rng);
  auto const o = loops_[0].forward.forward(u, mode, rng);
  return loops_[1].inverse.forward(o, mode, rng);
}

template <typename Scalar> NamedParameters<Scalar> Model<Scalar>::named_parameters() const
{
  NamedParameters<Scalar> out;
  auto add = [&](std::string const &prefix, NamedParameters<Scalar> const &ps) {
    for (auto const &[n, p] : ps) out.emplace_back(prefix + "." + n, p);
  };
  for (auto const &l : loops_) {
    add(l.forward_name, l.forward.named_parameters());
    add(l.inverse_name, l.inverse.named_parameters());
    add(l.target_critic_name, l.target_critic.named_parameters());
    add(l.source_critic_name, l.source_critic.named_parameters());
  }
  return out;
}

template <typename Scalar> std::vector<Var<Scalar>> Model<Scalar>::generator_parameters() const
{
  std::vector<Var<Scalar>> out;
  for (auto const &l : loops_) {
    auto g = l.generator_parameters();
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

template <typename Scalar> std::vector<Var<Scalar>> Model<Scalar>::critic_parameters() const
{
  std::vector<Var<Scalar>> out;
  for (auto const &l : loops_) {
    auto c = l.critic_parameters();
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

template class Generator<double>;
template class Generator<float>;
template class Critic<double>;
template class Critic<float>;
template struct DualGan<double>;
template struct DualGan<float>;
template class Model<double>;
template class Model<float>;

} // namespace ddgan
