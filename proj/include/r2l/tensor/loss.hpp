#pragma once

#include "r2l/tensor/matrix.hpp"

namespace r2l::tensor {

template <typename T>
struct MseResult {
  T loss = 0;            // mean of per_ray
  Vector<T> per_ray;     // mean over channels of squared error, one entry per row
};

/// Mean squared error between [B × C] batches (C = 3 for RGB).
template <typename T>
MseResult<T> mse_loss(const Matrix<T>& pred, const Matrix<T>& target);

/// d(mean loss)/d(pred) = 2 (pred − target) / (B·C).
template <typename T>
Matrix<T> mse_loss_grad(const Matrix<T>& pred, const Matrix<T>& target);

}  // namespace r2l::tensor
