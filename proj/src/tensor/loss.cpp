#include "r2l/tensor/loss.hpp"

#include "r2l/common/error.hpp"

namespace r2l::tensor {

namespace {
template <typename T>
void check_shapes(const Matrix<T>& pred, const Matrix<T>& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ConfigError("mse_loss: prediction and target shapes differ");
  }
  if (pred.rows() == 0 || pred.cols() == 0) throw ConfigError("mse_loss: empty batch");
}
}  // namespace

template <typename T>
MseResult<T> mse_loss(const Matrix<T>& pred, const Matrix<T>& target) {
  check_shapes(pred, target);
  MseResult<T> r;
  r.per_ray = (pred - target).array().square().rowwise().mean();
  // sequential sum so the scalar is exactly the mean of the vector
  T sum = 0;
  for (Index i = 0; i < r.per_ray.size(); ++i) sum += r.per_ray[i];
  r.loss = sum / static_cast<T>(r.per_ray.size());
  return r;
}

template <typename T>
Matrix<T> mse_loss_grad(const Matrix<T>& pred, const Matrix<T>& target) {
  check_shapes(pred, target);
  const T scale = T(2) / static_cast<T>(pred.rows() * pred.cols());
  return (pred - target) * scale;
}

template MseResult<float> mse_loss<float>(const Matrix<float>&, const Matrix<float>&);
template MseResult<double> mse_loss<double>(const Matrix<double>&, const Matrix<double>&);
template Matrix<float> mse_loss_grad<float>(const Matrix<float>&, const Matrix<float>&);
template Matrix<double> mse_loss_grad<double>(const Matrix<double>&, const Matrix<double>&);

}  // namespace r2l::tensor
