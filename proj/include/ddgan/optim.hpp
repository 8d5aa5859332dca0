// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "autodiff.hpp"

#include <span>
#include <vector>

namespace ddgan {

/// RMSProp over a fixed parameter list. State is one running mean of
/// squared gradients per parameter, kept in parameter order.
template <typename Scalar> class RmsProp
{
public:
  struct Options
  {
    double lr = 2e-4;
    double decay = 0.9;
    double eps = 1e-8;
  };

  RmsProp() = default;
  RmsProp(std::vector<Var<Scalar>> params, Options opts)
    : params_(std::move(params))
    , opts_(opts)
  {
    mean_square_.reserve(params_.size());
    for (auto const &p : params_) mean_square_.emplace_back(p.shape());
  }

  /// Applies one update from the accumulated gradients. Parameters without
  /// a gradient are left alone.
  void step()
  {
    Scalar const lr = static_cast<Scalar>(opts_.lr);
    Scalar const decay = static_cast<Scalar>(opts_.decay);
    Scalar const eps = static_cast<Scalar>(opts_.eps);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto &p = params_[i];
      if (!p.has_grad()) continue;
      auto const &g = p.grad().data();
      auto &ms = mean_square_[i].data();
      ms = decay * ms + (Scalar(1) - decay) * g.square();
      p.mutable_value().data() -= lr * g / (ms.sqrt() + eps);
    }
  }

  void zero_grad()
  {
    for (auto &p : params_) p.zero_grad();
  }

  std::vector<Var<Scalar>> const &parameters() const { return params_; }
  std::vector<Tensor<Scalar>> &state() { return mean_square_; }
  std::vector<Tensor<Scalar>> const &state() const { return mean_square_; }
  Options const &options() const { return opts_; }

private:
  std::vector<Var<Scalar>> params_;
  std::vector<Tensor<Scalar>> mean_square_;
  Options opts_;
};

/// Clamps every value of every parameter into [-c, c].
template <typename Scalar> void clip_weights(std::span<Var<Scalar>> params, Scalar c)
{
  for (auto &p : params) p.mutable_value().data() = p.value().data().min(c).max(-c);
}

} // namespace ddgan
