#include "r2l/tensor/sequential.hpp"

#include "r2l/common/error.hpp"

namespace r2l::tensor {

template <typename T>
Sequential<T>::Sequential(std::vector<DenseLayer<T>> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ConfigError("sequential network needs at least one layer");
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    if (layers_[i].in_dim() != layers_[i - 1].out_dim()) throw ConfigError("sequential layer widths do not chain");
  }
}

template <typename T>
Matrix<T> Sequential<T>::forward(const Matrix<T>& batch) const {
  Matrix<T> h = batch;
  for (const auto& layer : layers_) h = forward_dense(layer, h);
  return h;
}

template <typename T>
Matrix<T> Sequential<T>::forward(const Matrix<T>& batch, GradientTape<T>& tape) const {
  tape.begin_record(layers_.size());
  Matrix<T> h = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) h = forward_dense(layers_[i], std::move(h), tape.cache(i));
  return h;
}

template <typename T>
Matrix<T> Sequential<T>::backward(GradientTape<T>& tape, const Matrix<T>& loss_grad) const {
  tape.consume();
  Matrix<T> g = loss_grad;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = backward_dense(layers_[i], tape.cache(i), g, tape.grad(i));
  }
  return g;
}

template class Sequential<float>;
template class Sequential<double>;

}  // namespace r2l::tensor
