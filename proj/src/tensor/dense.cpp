#include "r2l/tensor/dense.hpp"

#include <cmath>
#include <string>

#include "r2l/common/error.hpp"

namespace r2l::tensor {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softplus: return "softplus";
  }
  return "?";
}

namespace {

template <typename T>
T sigmoid(T x) {
  // split on sign to avoid exp overflow
  if (x >= 0) {
    const T e = std::exp(-x);
    return T(1) / (T(1) + e);
  }
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
T softplus(T x) {
  return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <typename T>
void check_input(const DenseLayer<T>& layer, Index cols) {
  if (cols != layer.in_dim()) {
    throw ConfigError("dense layer expects " + std::to_string(layer.in_dim()) + " inputs, got " +
                      std::to_string(cols));
  }
}

template <typename T>
void affine(const DenseLayer<T>& layer, const Matrix<T>& batch, Matrix<T>& out) {
  out.noalias() = batch * layer.weight.transpose();
  if (layer.activation == Activation::relu) {
    out = (out.rowwise() + layer.bias.transpose()).cwiseMax(T(0));  // one pass over the output
    return;
  }
  out.rowwise() += layer.bias.transpose();
  apply_activation(layer.activation, out);
}

}  // namespace

template <typename T>
void apply_activation(Activation act, Matrix<T>& values) {
  switch (act) {
    case Activation::identity:
      break;
    case Activation::relu:
      values = values.cwiseMax(T(0));
      break;
    case Activation::sigmoid:
      values = values.unaryExpr([](T x) { return sigmoid(x); });
      break;
    case Activation::softplus:
      values = values.unaryExpr([](T x) { return softplus(x); });
      break;
  }
}

template <typename T>
Matrix<T> forward_dense(const DenseLayer<T>& layer, const Matrix<T>& batch) {
  check_input(layer, batch.cols());
  Matrix<T> out;
  affine(layer, batch, out);
  return out;
}

template <typename T>
const Matrix<T>& forward_dense(const DenseLayer<T>& layer, Matrix<T> batch, DenseCache<T>& cache) {
  check_input(layer, batch.cols());
  cache.input = std::move(batch);
  affine(layer, cache.input, cache.output);
  return cache.output;
}

template <typename T>
Matrix<T> backward_dense(const DenseLayer<T>& layer, const DenseCache<T>& cache, const Matrix<T>& grad_output,
                         DenseGrad<T>& grad, bool need_input_grad) {
  if (grad_output.rows() != cache.output.rows() || grad_output.cols() != layer.out_dim()) {
    throw UsageError("gradient shape does not match the recorded forward pass");
  }
  // dL/d(pre-activation), derived from the stored output y
  Matrix<T> grad_pre;
  const auto& y = cache.output;
  switch (layer.activation) {
    case Activation::identity:
      grad_pre = grad_output;
      break;
    case Activation::relu:
      grad_pre = (y.array() > T(0)).select(grad_output, T(0));
      break;
    case Activation::sigmoid:
      grad_pre = grad_output.cwiseProduct(y.cwiseProduct((T(1) - y.array()).matrix()));
      break;
    case Activation::softplus:
      // softplus'(x) = sigmoid(x) = 1 − exp(−y)
      grad_pre = grad_output.cwiseProduct((-(-y.array()).exp() + T(1)).matrix());
      break;
  }
  grad.weight.noalias() += grad_pre.transpose() * cache.input;
  grad.bias.noalias() += grad_pre.colwise().sum().transpose();
  if (!need_input_grad) return {};
  Matrix<T> grad_input;
  grad_input.noalias() = grad_pre * layer.weight;
  return grad_input;
}

template <typename T>
void init_he(DenseLayer<T>& layer, Rng& rng, double gain) {
  const double stddev = gain * std::sqrt(2.0 / static_cast<double>(layer.in_dim()));
  for (Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = static_cast<T>(stddev * rng.normal());
  layer.bias.setZero();
}

template <typename T>
void init_glorot(DenseLayer<T>& layer, Rng& rng, double gain) {
  const double limit = gain * std::sqrt(6.0 / static_cast<double>(layer.in_dim() + layer.out_dim()));
  for (Index i = 0; i < layer.weight.size(); ++i) {
    layer.weight.data()[i] = static_cast<T>(rng.uniform(-limit, limit));
  }
  layer.bias.setZero();
}

#define R2L_INSTANTIATE(T)                                                                          \
  template void apply_activation<T>(Activation, Matrix<T>&);                                        \
  template Matrix<T> forward_dense<T>(const DenseLayer<T>&, const Matrix<T>&);                      \
  template const Matrix<T>& forward_dense<T>(const DenseLayer<T>&, Matrix<T>, DenseCache<T>&);      \
  template Matrix<T> backward_dense<T>(const DenseLayer<T>&, const DenseCache<T>&, const Matrix<T>&, \
                                       DenseGrad<T>&, bool);                                        \
  template void init_he<T>(DenseLayer<T>&, Rng&, double);                                           \
  template void init_glorot<T>(DenseLayer<T>&, Rng&, double);

R2L_INSTANTIATE(float)
R2L_INSTANTIATE(double)
#undef R2L_INSTANTIATE

}  // namespace r2l::tensor
