#pragma once

#include <Eigen/Core>

namespace r2l::tensor {

/// Row-major so a batch is a stack of rows, one ray (or sample) per row.
template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

}  // namespace r2l::tensor
