#pragma once

#include <cstddef>
#include <string_view>

#include "r2l/common/rng.hpp"
#include "r2l/tensor/matrix.hpp"

namespace r2l::tensor {

enum class Activation { identity, relu, sigmoid, softplus };

std::string_view to_string(Activation a);

/// out = act(in · Wᵀ + b), row-wise.
template <typename T>
struct DenseLayer {
  Matrix<T> weight;  // out_dim × in_dim
  Vector<T> bias;    // out_dim
  Activation activation = Activation::identity;

  DenseLayer() = default;
  DenseLayer(Index in_dim, Index out_dim, Activation act)
      : weight(Matrix<T>::Zero(out_dim, in_dim)), bias(Vector<T>::Zero(out_dim)), activation(act) {}

  Index in_dim() const { return weight.cols(); }
  Index out_dim() const { return weight.rows(); }
  std::size_t parameter_count() const { return static_cast<std::size_t>(weight.size() + bias.size()); }
  bool all_finite() const { return weight.allFinite() && bias.allFinite(); }
};

/// Parameter-shaped buffer; also used for Adam moments.
template <typename T>
struct DenseGrad {
  Matrix<T> weight;
  Vector<T> bias;

  DenseGrad() = default;
  explicit DenseGrad(const DenseLayer<T>& layer)
      : weight(Matrix<T>::Zero(layer.out_dim(), layer.in_dim())), bias(Vector<T>::Zero(layer.out_dim())) {}

  void set_zero() {
    weight.setZero();
    bias.setZero();
  }
  DenseGrad& operator+=(const DenseGrad& other) {
    weight += other.weight;
    bias += other.bias;
    return *this;
  }
  bool all_finite() const { return weight.allFinite() && bias.allFinite(); }
};

/// What backward needs from the forward pass. The activation derivative is
/// recovered from the post-activation output for every supported activation.
template <typename T>
struct DenseCache {
  Matrix<T> input;
  Matrix<T> output;
};

/// Throws ConfigError on in_dim mismatch.
template <typename T>
Matrix<T> forward_dense(const DenseLayer<T>& layer, const Matrix<T>& batch);

/// Recording variant: stores the input and output in `cache`, returns the output.
template <typename T>
const Matrix<T>& forward_dense(const DenseLayer<T>& layer, Matrix<T> batch, DenseCache<T>& cache);

/// Accumulates parameter gradients into `grad` and returns dL/d(input).
template <typename T>
Matrix<T> backward_dense(const DenseLayer<T>& layer, const DenseCache<T>& cache, const Matrix<T>& grad_output,
                         DenseGrad<T>& grad, bool need_input_grad = true);

template <typename T>
void apply_activation(Activation act, Matrix<T>& values);

/// He (fan-in) normal init scaled by `gain`; bias zero.
template <typename T>
void init_he(DenseLayer<T>& layer, Rng& rng, double gain = 1.0);

/// Glorot-uniform style init scaled by `gain`; bias zero.
template <typename T>
void init_glorot(DenseLayer<T>& layer, Rng& rng, double gain = 1.0);

}  // namespace r2l::tensor
