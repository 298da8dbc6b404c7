#pragma once

#include <vector>

#include "r2l/tensor/dense.hpp"
#include "r2l/tensor/tape.hpp"

namespace r2l::tensor {

/// Plain stack of dense layers. Used directly for small networks and gradient checks.
template <typename T>
class Sequential {
 public:
  Sequential() = default;
  explicit Sequential(std::vector<DenseLayer<T>> layers);

  std::vector<DenseLayer<T>>& layers() { return layers_; }
  const std::vector<DenseLayer<T>>& layers() const { return layers_; }

  Index in_dim() const { return layers_.front().in_dim(); }
  Index out_dim() const { return layers_.back().out_dim(); }

  Matrix<T> forward(const Matrix<T>& batch) const;
  Matrix<T> forward(const Matrix<T>& batch, GradientTape<T>& tape) const;
  /// Returns dL/d(batch).
  Matrix<T> backward(GradientTape<T>& tape, const Matrix<T>& loss_grad) const;

 private:
  std::vector<DenseLayer<T>> layers_;
};

}  // namespace r2l::tensor
