// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tensor.hpp"

#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

namespace ddgan {

template <typename Scalar> struct Node
{
  Tensor<Scalar> value;
  Tensor<Scalar> grad; // empty until something is accumulated into it
  bool requires_grad = false;
  char const *op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node &)> backward; // pushes this->grad into inputs

  bool is_leaf() const { return inputs.empty(); }

  Tensor<Scalar> &grad_buffer()
  {
    if (grad.empty()) grad = Tensor<Scalar>(value.shape());
    return grad;
  }
};

/// Handle to a node of the dynamic differentiation graph.
///
/// Ops build new nodes eagerly; a node records its inputs only when at least
/// one of them requires a gradient, so constant sub-expressions are dropped
/// from the graph as soon as they are evaluated.
template <typename Scalar> class Var
{
public:
  using NodePtr = std::shared_ptr<Node<Scalar>>;

  Var() = default;
  explicit Var(NodePtr node)
    : node_(std::move(node))
  {
  }

  static Var leaf(Tensor<Scalar> value, bool requires_grad)
  {
    auto n = std::make_shared<Node<Scalar>>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    return Var(std::move(n));
  }
  static Var parameter(Tensor<Scalar> value) { return leaf(std::move(value), true); }
  static Var constant(Tensor<Scalar> value) { return leaf(std::move(value), false); }

  Tensor<Scalar> const &value() const { return node_->value; }
  Tensor<Scalar> &mutable_value() { return node_->value; }
  Shape const &shape() const { return node_->value.shape(); }
  Index size() const { return node_->value.size(); }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  /// Gradient buffer; zeros when nothing has been accumulated yet.
  Tensor<Scalar> const &grad() const { return node_->grad_buffer(); }
  Tensor<Scalar> &mutable_grad() { return node_->grad_buffer(); }
  void zero_grad() { node_->grad = Tensor<Scalar>(); }

  /// Same value, cut from the graph.
  Var detach() const { return constant(node_->value); }

  Scalar item() const
  {
    if (size() != 1) throw ShapeError("item() needs a single-element tensor, got " + to_string(shape()));
    return node_->value[0];
  }

  NodePtr const &node() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

private:
  NodePtr node_;
};

/// Creates an op node. `backward` receives the finished node and must add
/// its gradient contribution into every input that requires one.
template <typename Scalar, typename Backward>
Var<Scalar> make_op(char const *name, Tensor<Scalar> value, std::vector<Var<Scalar>> const &inputs,
                    Backward &&backward)
{
  auto n = std::make_shared<Node<Scalar>>();
  n->value = std::move(value);
  n->op = name;
  for (auto const &in : inputs) n->requires_grad = n->requires_grad || in.requires_grad();
  if (n->requires_grad) {
    n->inputs.reserve(inputs.size());
    for (auto const &in : inputs) n->inputs.push_back(in.node());
    n->backward = std::forward<Backward>(backward);
  }
  return Var<Scalar>(std::move(n));
}

/// Nodes reachable from `root` that take part in differentiation, inputs
/// before consumers. Each node appears once.
template <typename Scalar> std::vector<Node<Scalar> *> topological_order(Var<Scalar> const &root)
{
  std::vector<Node<Scalar> *> order;
  if (!root.requires_grad()) return order;
  std::unordered_set<Node<Scalar> *> seen;
  std::vector<std::pair<Node<Scalar> *, std::size_t>> stack;
  stack.emplace_back(root.node().get(), 0);
  seen.insert(root.node().get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node<Scalar> *child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

/// Reverse-mode sweep from a scalar. Leaf gradients accumulate across calls;
/// intermediate gradients are released once propagated.
template <typename Scalar> void backward(Var<Scalar> const &loss)
{
  if (loss.size() != 1) throw ShapeError("backward() needs a scalar loss, got " + to_string(loss.shape()));
  auto order = topological_order(loss);
  if (order.empty()) return;
  loss.node()->grad_buffer()[0] += Scalar(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<Scalar> &node = **it;
    if (node.is_leaf() || node.grad.empty()) continue;
    node.backward(node);
    node.grad = Tensor<Scalar>();
  }
}

// ---------------------------------------------------------------------------
// Elementwise and reduction ops

namespace detail {
inline void require_same_shape(char const *op, Shape const &a, Shape const &b)
{
  if (a != b) throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
}
} // namespace detail

template <typename Scalar> Var<Scalar> operator+(Var<Scalar> const &a, Var<Scalar> const &b)
{
  detail::require_same_shape("add", a.shape(), b.shape());
  Tensor<Scalar> out(a.shape(), a.value().data() + b.value().data());
  return make_op<Scalar>("add", std::move(out), {a, b}, [](Node<Scalar> &n) {
    for (auto &in : n.inputs)
      if (in->requires_grad) in->grad_buffer().data() += n.grad.data();
  });
}

template <typename Scalar> Var<Scalar> operator-(Var<Scalar> const &a, Var<Scalar> const &b)
{
  detail::require_same_shape("sub", a.shape(), b.shape());
  Tensor<Scalar> out(a.shape(), a.value().data() - b.value().data());
  return make_op<Scalar>("sub", std::move(out), {a, b}, [](Node<Scalar> &n) {
    if (n.inputs[0]->requires_grad) n.inputs[0]->grad_buffer().data() += n.grad.data();
    if (n.inputs[1]->requires_grad) n.inputs[1]->grad_buffer().data() -= n.grad.data();
  });
}

template <typename Scalar> Var<Scalar> operator*(Var<Scalar> const &a, Var<Scalar> const &b)
{
  detail::require_same_shape("mul", a.shape(), b.shape());
  Tensor<Scalar> out(a.shape(), a.value().data() * b.value().data());
  return make_op<Scalar>("mul", std::move(out), {a, b}, [](Node<Scalar> &n) {
    auto &x = n.inputs[0];
    auto &y = n.inputs[1];
    if (x->requires_grad) x->grad_buffer().data() += n.grad.data() * y->value.data();
    if (y->requires_grad) y->grad_buffer().data() += n.grad.data() * x->value.data();
  });
}

template <typename Scalar> Var<Scalar> scale(Var<Scalar> const &a, Scalar s)
{
  Tensor<Scalar> out(a.shape(), a.value().data() * s);
  return make_op<Scalar>("scale", std::move(out), {a}, [s](Node<Scalar> &n) {
    n.inputs[0]->grad_buffer().data() += n.grad.data() * s;
  });
}

template <typename Scalar> Var<Scalar> operator*(Scalar s, Var<Scalar> const &a) { return scale(a, s); }
template <typename Scalar> Var<Scalar> operator-(Var<Scalar> const &a) { return scale(a, Scalar(-1)); }

template <typename Scalar> Var<Scalar> square(Var<Scalar> const &a)
{
  Tensor<Scalar> out(a.shape(), a.value().data().square());
  return make_op<Scalar>("square", std::move(out), {a}, [](Node<Scalar> &n) {
    n.inputs[0]->grad_buffer().data() += Scalar(2) * n.inputs[0]->value.data() * n.grad.data();
  });
}

/// |x|, with zero subgradient at 0.
template <typename Scalar> Var<Scalar> abs(Var<Scalar> const &a)
{
  Tensor<Scalar> out(a.shape(), a.value().data().abs());
  return make_op<Scalar>("abs", std::move(out), {a}, [](Node<Scalar> &n) {
    auto const &x = n.inputs[0]->value.data();
    n.inputs[0]->grad_buffer().data() += n.grad.data() * x.sign();
  });
}

template <typename Scalar> Var<Scalar> sum(Var<Scalar> const &a)
{
  Tensor<Scalar> out(Shape{1}, Tensor<Scalar>::Array::Constant(1, a.value().data().sum()));
  return make_op<Scalar>("sum", std::move(out), {a}, [](Node<Scalar> &n) {
    n.inputs[0]->grad_buffer().data() += n.grad[0];
  });
}

template <typename Scalar> Var<Scalar> mean(Var<Scalar> const &a)
{
  Scalar const inv = Scalar(1) / static_cast<Scalar>(a.size());
  Tensor<Scalar> out(Shape{1}, Tensor<Scalar>::Array::Constant(1, a.value().data().sum() * inv));
  return make_op<Scalar>("mean", std::move(out), {a}, [inv](Node<Scalar> &n) {
    n.inputs[0]->grad_buffer().data() += n.grad[0] * inv;
  });
}

/// Mean absolute difference, the reconstruction distance used by the losses.
template <typename Scalar> Var<Scalar> l1_distance(Var<Scalar> const &a, Var<Scalar> const &b)
{
  return mean(abs(a - b));
}

template <typename Scalar> Var<Scalar> leaky_relu(Var<Scalar> const &a, Scalar slope)
{
  auto const &x = a.value().data();
  Tensor<Scalar> out(a.shape(), (x >= Scalar(0)).select(x, x * slope));
  return make_op<Scalar>("leaky_relu", std::move(out), {a}, [slope](Node<Scalar> &n) {
    auto const &x = n.inputs[0]->value.data();
    n.inputs[0]->grad_buffer().data() += (x >= Scalar(0)).select(n.grad.data(), n.grad.data() * slope);
  });
}

template <typename Scalar> Var<Scalar> tanh(Var<Scalar> const &a)
{
  Tensor<Scalar> out(a.shape(), a.value().data().tanh());
  return make_op<Scalar>("tanh", std::move(out), {a}, [](Node<Scalar> &n) {
    n.inputs[0]->grad_buffer().data() += n.grad.data() * (Scalar(1) - n.value.data().square());
  });
}

} // namespace ddgan
