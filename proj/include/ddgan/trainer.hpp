// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "config.hpp"
#include "metrics.hpp"
#include "networks.hpp"
#include "optim.hpp"
#include "transition.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <type_traits>
#include <string>
#include <vector>

namespace ddgan {

/// One training example laid out as [1, S, S] matrices.
template <typename Scalar> struct Sample
{
  std::string id;
  Tensor<Scalar> u, v, o;
  Index u_pad = 0; // padding of the EEG view, for un-reshaping translations
};

/// Matrix views of every pair. All three signals of a pair must share one
/// side length; shorter members are zero-padded to the longest first.
template <typename Scalar> std::vector<Sample<Scalar>> prepare_samples(std::vector<PairedExample> const &pairs, int depth);

// ---------------------------------------------------------------------------
// Losses

template <typename Scalar> struct GeneratorLoss
{
  Var<Scalar> total;
  double recon_a = 0.0; // unweighted reconstruction distances
  double recon_b = 0.0;
};

/// U <-> O generators:
///   lambda_u |u - B(A u)| + lambda_o |o - A(B o)| - D_o(A u) - D_u(B o)
/// with A = U->O, B = O->U, D_o / D_u the O and U critics of loop 0.
template <typename Scalar>
GeneratorLoss<Scalar> generator_loss_1(Var<Scalar> const &u, Var<Scalar> const &o, Model<Scalar> const &model,
                                       Mode mode, Rng &rng);

/// O <-> V generators over the large cycle, x = A(B o):
///   lambda_v |v - D(C v)| + lambda_o |x - C(D x)| - D_v(D x) - D_o2(C v)
/// with C = V->O, D = O->V. `x` is cut from the graph when the model's
/// detach_large_cycle is set.
template <typename Scalar>
GeneratorLoss<Scalar> generator_loss_2(Var<Scalar> const &v, Var<Scalar> const &o, Model<Scalar> const &model,
                                       Mode mode, Rng &rng);

/// Critic losses fake - real, generator outputs detached:
///   [0] D_o1(A u) - D_o1(o)      [1] D_u(B o) - D_u(u)
///   [2] D_o2(C v) - D_o2(x)      [3] D_v(D x) - D_v(v)
template <typename Scalar>
std::array<Var<Scalar>, 4> critic_losses(Var<Scalar> const &u, Var<Scalar> const &v, Var<Scalar> const &o,
                                         Model<Scalar> const &model, Mode mode, Rng &rng);

/// Single U <-> V loop, G = U->V, F = V->U:
///   lambda_u |u - F(G u)| + lambda_v |v - G(F v)| - D_v(G u) - D_u(F v)
template <typename Scalar>
GeneratorLoss<Scalar> single_generator_loss(Var<Scalar> const &u, Var<Scalar> const &v, Model<Scalar> const &model,
                                            Mode mode, Rng &rng);

/// [0] D_v(G u) - D_v(v)     [1] D_u(F v) - D_u(u)
template <typename Scalar>
std::array<Var<Scalar>, 2> single_critic_losses(Var<Scalar> const &u, Var<Scalar> const &v, Model<Scalar> const &model,
                                                Mode mode, Rng &rng);

// ---------------------------------------------------------------------------
// Training

/// Loss names recorded each step, in log order.
std::vector<std::string> loss_names(Architecture a);

using LossHistory = std::map<std::string, std::vector<double>>;

template <typename Scalar> struct TrainState
{
  Model<Scalar> model;
  std::int64_t step = 0;
  Rng rng;
  LossHistory loss_history;
  RmsProp<Scalar> critic_optimizer;
  std::vector<RmsProp<Scalar>> generator_optimizers; // one per loop
  std::uint64_t seed = 0;
  std::string manifest_hash; // of the training data, when known
  KeyValues info;            // free-form run details stored with checkpoints
};

/// Fresh model and optimizers. Model weights depend on `seed` only.
template <typename Scalar> TrainState<Scalar> make_train_state(ModelConfig const &cfg, std::uint64_t seed);

/// Losses of one step, in loss_names() order.
using StepLosses = std::vector<std::pair<std::string, double>>;
template <typename Scalar> using StepObserver = std::function<void(TrainState<Scalar> const &, StepLosses const &)>;

/// Reported after every optimizer step taken inside train().
struct UpdateEvent
{
  bool critic = false;  // a critic step (already clipped) rather than a generator step
  std::size_t loop = 0; // generator loop that was updated
  int iteration = 0;    // critic iteration within the outer step
};
template <typename Scalar> using UpdateObserver = std::function<void(Model<Scalar> const &, UpdateEvent const &)>;

/// Runs `steps` outer iterations: critic_iters critic updates (each followed
/// by weight clipping), then one update per generator pair. Throws
/// NumericalError with a per-loss dump when a loss turns non-finite.
template <typename Scalar>
void train(TrainState<Scalar> &state, std::vector<Sample<Scalar>> const &samples, std::int64_t steps,
           std::type_identity_t<StepObserver<Scalar>> const &observer = {},
           std::type_identity_t<UpdateObserver<Scalar>> const &on_update = {});

/// Fresh model trained from scratch.
template <typename Scalar>
TrainState<Scalar> train(std::vector<Sample<Scalar>> const &samples, ModelConfig const &cfg, std::int64_t steps,
                         std::uint64_t seed);

/// Single U <-> V baseline with the same machinery.
template <typename Scalar>
TrainState<Scalar> train_single_dualgan(std::vector<Sample<Scalar>> const &samples, ModelConfig cfg,
                                        std::int64_t steps, std::uint64_t seed);

/// Dataset-mean unweighted reconstruction distances in eval mode, keyed like
/// the recon_* entries of loss_names().
template <typename Scalar>
std::map<std::string, double> reconstruction_report(Model<Scalar> const &model,
                                                    std::vector<Sample<Scalar>> const &samples);

/// `step,loss_name,value` rows for history entries [from_step, end).
std::string loss_csv(LossHistory const &history, Architecture a, std::int64_t from_step = 0,
                     bool header = true);

// ---------------------------------------------------------------------------
// Evaluation

/// EEG -> speech in eval mode, un-reshaped to the EEG's original length.
template <typename Scalar> Eigen::VectorXd translate_signal(Model<Scalar> const &model, Sample<Scalar> const &sample);

/// Nearest-neighbour accuracy of translations against the pairs' speech.
template <typename Scalar>
EvalReport translation_accuracy(Model<Scalar> const &model, std::vector<Sample<Scalar>> const &samples,
                                std::vector<PairedExample> const &pairs, MelCepstrumConfig const &mel = {});

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr std::uint32_t checkpoint_version = 1;

/// Binary checkpoint: magic `DDGN`, u32 version, u32-length UTF-8 metadata
/// (`key=value` lines), u32 record count, named tensor records (u32 name
/// length, name, u8 dtype 1=f64 2=f32, u32 rank, u64 extents, little-endian
/// payload) and a trailing FNV-1a checksum. Written atomically.
template <typename Scalar> void save_checkpoint(TrainState<Scalar> const &state, std::filesystem::path const &path);

/// Throws DataError on bad magic, version, checksum, or records that do not
/// match the stored configuration.
template <typename Scalar> TrainState<Scalar> load_checkpoint(std::filesystem::path const &path);

/// Metadata block of a checkpoint without loading its tensors.
KeyValues read_checkpoint_metadata(std::filesystem::path const &path);

// ---------------------------------------------------------------------------
// Proportion sweep

struct SweepRow
{
  double rho = 0.0;
  double accuracy = 0.0;
  std::uint64_t seed = 0;
};

struct SweepOptions
{
  std::vector<double> proportions{0.2, 0.4, 0.6, 0.8};
  std::int64_t steps = 50;
  std::uint64_t seed = 0;
};

/// Rebuilds the transition members for each proportion, trains a fresh
/// model, and scores nearest-neighbour accuracy on the same pairs.
std::vector<SweepRow> proportion_sweep(std::vector<PairedExample> const &pairs, ModelConfig const &cfg,
                                       SweepOptions const &opts);

/// `rho,accuracy,seed` rows with six decimals, then `#` reference lines.
std::string sweep_csv(std::vector<SweepRow> const &rows);

extern template struct TrainState<double>;
extern template struct TrainState<float>;

} // namespace ddgan
