// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ops.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ddgan {

/// U-shaped generator layout.
struct GeneratorConfig
{
  int depth = 4; // pooling halvings, each mirrored by one up-sampling stage
  int kernel = 3;
  int conv_stride = 1;
  int pool_stride = 2;
  double activation_slope = 0.2;
  double decoder_slope = 0.2; // 0 gives plain ReLU on the up-sampling path
  double dropout_rate = 0.5;
  int base_channels = 16;
  int max_channels = 128;

  /// Channels produced by encoder stage `stage` (and its mirrored decoder stage).
  int channels(int stage) const;
  /// Spatial side lengths must be multiples of this.
  Index side_multiple() const { return Index{1} << depth; }
  /// Problems with the configuration, empty when valid.
  std::vector<std::string> problems() const;
  void validate() const;
};

/// Patch critic layout: a stack of strided convolutions averaged to a score.
struct CriticConfig
{
  int layers = 5;
  int kernel = 3;
  int stride = 2;
  int base_channels = 16;
  int max_channels = 128;
  double activation_slope = 0.2;

  int channels(int layer) const; // output channels of `layer`
  std::vector<std::string> problems() const;
  void validate() const;
};

template <typename Scalar> struct ConvLayer
{
  std::string name;
  Var<Scalar> weight;
  Var<Scalar> bias;
};

template <typename Scalar> using NamedParameters = std::vector<std::pair<std::string, Var<Scalar>>>;

/// Encoder of conv/LeakyReLU/max-pool stages, decoder of upsample/concat-skip/
/// transposed-conv/LeakyReLU/dropout stages, and a bounded 1-channel head.
/// Input and output are [1, S, S] with S a multiple of 2^depth.
///
/// Parameters are shared handles, so copies alias the same weights.
template <typename Scalar> class Generator
{
public:
  Generator() = default;
  Generator(GeneratorConfig cfg, std::uint64_t seed);

  Var<Scalar> forward(Var<Scalar> const &x, Mode mode, Rng &rng) const;

  /// Throws ShapeError naming the padding required when `shape` cannot pass
  /// through the encoder.
  void check_input(Shape const &shape) const;

  NamedParameters<Scalar> named_parameters() const;
  std::vector<Var<Scalar>> parameters() const;
  Index parameter_count() const;
  GeneratorConfig const &config() const { return cfg_; }

  std::vector<ConvLayer<Scalar>> &encoder() { return encoder_; }
  std::vector<ConvLayer<Scalar>> &decoder() { return decoder_; }
  ConvLayer<Scalar> &head() { return head_; }

private:
  GeneratorConfig cfg_;
  std::vector<ConvLayer<Scalar>> encoder_;
  std::vector<ConvLayer<Scalar>> decoder_; // decoder_[k] mirrors encoder_[k]
  ConvLayer<Scalar> head_;
};

/// Markovian patch critic (no output squashing).
template <typename Scalar> class Critic
{
public:
  Critic() = default;
  Critic(CriticConfig cfg, std::uint64_t seed);

  /// Mean of the patch map.
  Var<Scalar> score(Var<Scalar> const &x) const;
  Var<Scalar> patch_map(Var<Scalar> const &x) const;

  NamedParameters<Scalar> named_parameters() const;
  std::vector<Var<Scalar>> parameters() const;
  CriticConfig const &config() const { return cfg_; }
  std::vector<ConvLayer<Scalar>> &layers() { return layers_; }

private:
  CriticConfig cfg_;
  std::vector<ConvLayer<Scalar>> layers_;
};

enum class Architecture
{
  dual_dual, // U <-> O and V <-> O loops joined through the transition domain
  single     // one U <-> V loop
};

std::string to_string(Architecture a);
Architecture parse_architecture(std::string const &text);

struct Hyperparameters
{
  double lambda_u = 500.0;
  double lambda_v = 500.0;
  double lambda_o = 500.0;
  int critic_iters = 5; // critic updates per generator update
  int batch_size = 1;
  double learning_rate = 2e-4;
  double clip = 0.01;
  double rms_decay = 0.9;
  double rms_eps = 1e-8;
  bool detach_large_cycle = true; // keep the V<->O update out of the U<->O generators
};

struct ModelConfig
{
  Architecture architecture = Architecture::dual_dual;
  GeneratorConfig generator;
  CriticConfig critic;
  Hyperparameters hyper;

  std::vector<std::string> problems() const;
  /// Non-fatal remarks, e.g. reconstruction weights outside [100, 1000].
  std::vector<std::string> warnings() const;
  void validate() const;
};

/// One adversarial dual-learning loop between a source and a target domain.
template <typename Scalar> struct DualGan
{
  std::string source, target; // domain letters
  Generator<Scalar> forward;  // source -> target
  Generator<Scalar> inverse;  // target -> source
  Critic<Scalar> target_critic;
  Critic<Scalar> source_critic;
  std::string forward_name, inverse_name, target_critic_name, source_critic_name;

  std::vector<Var<Scalar>> generator_parameters() const;
  std::vector<Var<Scalar>> critic_parameters() const;
};

/// Full model. In dual_dual mode loop 0 is U <-> O (generators U->O, O->U,
/// critics on O and U) and loop 1 is V <-> O (generators V->O, O->V, critics
/// on O and V). In single mode loop 0 is U <-> V.
template <typename Scalar> class Model
{
public:
  Model() = default;
  Model(ModelConfig cfg, std::uint64_t seed);

  ModelConfig const &config() const { return cfg_; }
  Architecture architecture() const { return cfg_.architecture; }

  DualGan<Scalar> &loop(std::size_t i) { return loops_.at(i); }
  DualGan<Scalar> const &loop(std::size_t i) const { return loops_.at(i); }
  std::size_t loop_count() const { return loops_.size(); }

  /// EEG -> speech: O->V after U->O, or U->V in single mode.
  Var<Scalar> translate(Var<Scalar> const &u, Mode mode, Rng &rng) const;

  NamedParameters<Scalar> named_parameters() const;
  std::vector<Var<Scalar>> generator_parameters() const;
  std::vector<Var<Scalar>> critic_parameters() const;

private:
  ModelConfig cfg_;
  std::vector<DualGan<Scalar>> loops_;
};

/// Value copy of every parameter, in named_parameters() order.
template <typename Scalar> std::vector<Tensor<Scalar>> snapshot(NamedParameters<Scalar> const &params)
{
  std::vector<Tensor<Scalar>> out;
  out.reserve(params.size());
  for (auto const &[name, p] : params) out.push_back(p.value());
  return out;
}

extern template class Generator<double>;
extern template class Generator<float>;
extern template class Critic<double>;
extern template class Critic<float>;
extern template struct DualGan<double>;
extern template struct DualGan<float>;
extern template class Model<double>;
extern template class Model<float>;

} // namespace ddgan
