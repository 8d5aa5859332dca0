// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ddgan {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

/// Raised when operand extents are incompatible with an operation.
class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

inline std::string to_string(Shape const &shape)
{
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

inline Index element_count(Shape const &shape)
{
  return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
}

/// Dense row-major n-dimensional array. The last extent varies fastest.
template <typename Scalar> class Tensor
{
public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixMap = Eigen::Map<RowMatrix>;
  using ConstMatrixMap = Eigen::Map<RowMatrix const>;

  Tensor() = default;

  explicit Tensor(Shape shape, Scalar fill = Scalar(0))
    : shape_(std::move(shape))
  {
    check_extents();
    data_ = Array::Constant(element_count(shape_), fill);
  }

  Tensor(Shape shape, Array data)
    : shape_(std::move(shape))
    , data_(std::move(data))
  {
    check_extents();
    if (data_.size() != element_count(shape_)) {
      throw ShapeError("tensor data has " + std::to_string(data_.size()) + " values but shape " +
                       to_string(shape_) + " needs " + std::to_string(element_count(shape_)));
    }
  }

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

  Shape const &shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index i) const { return shape_.at(static_cast<std::size_t>(i)); }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  Array &data() { return data_; }
  Array const &data() const { return data_; }
  Scalar *raw() { return data_.data(); }
  Scalar const *raw() const { return data_.data(); }

  Scalar &operator[](Index i) { return data_[i]; }
  Scalar operator[](Index i) const { return data_[i]; }

  Scalar &at(Index c, Index h, Index w) { return data_[(c * shape_[1] + h) * shape_[2] + w]; }
  Scalar at(Index c, Index h, Index w) const { return data_[(c * shape_[1] + h) * shape_[2] + w]; }
  Scalar &at(Index o, Index i, Index h, Index w)
  {
    return data_[((o * shape_[1] + i) * shape_[2] + h) * shape_[3] + w];
  }
  Scalar at(Index o, Index i, Index h, Index w) const
  {
    return data_[((o * shape_[1] + i) * shape_[2] + h) * shape_[3] + w];
  }

  /// Leading extent as rows, everything else flattened into columns.
  MatrixMap matrix() { return MatrixMap(data_.data(), shape_.front(), size() / shape_.front()); }
  ConstMatrixMap matrix() const
  {
    return ConstMatrixMap(data_.data(), shape_.front(), size() / shape_.front());
  }

  Tensor reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

  bool all_finite() const { return data_.isFinite().all(); }

  template <typename Other> Tensor<Other> cast() const
  {
    return Tensor<Other>(shape_, data_.template cast<Other>());
  }

  friend bool operator==(Tensor const &a, Tensor const &b)
  {
    return a.shape_ == b.shape_ && (a.data_ == b.data_).all();
  }

private:
  void check_extents() const
  {
    for (auto e : shape_) {
      if (e <= 0) throw ShapeError("tensor extents must be positive, got " + to_string(shape_));
    }
  }

  Shape shape_;
  Array data_;
};

} // namespace ddgan
