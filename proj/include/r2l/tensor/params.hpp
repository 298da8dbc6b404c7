#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "r2l/tensor/dense.hpp"

namespace r2l::tensor {

/// Weights then bias, layer by layer: the declared parameter order used for
/// checkpoints and gradient checks.
template <typename T>
std::size_t parameter_count(std::span<const DenseLayer<T>> layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.parameter_count();
  return n;
}

template <typename T>
std::vector<T> flatten_parameters(std::span<const DenseLayer<T>> layers) {
  std::vector<T> out;
  out.reserve(parameter_count(layers));
  for (const auto& l : layers) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

template <typename T>
std::vector<T> flatten_gradients(std::span<const DenseGrad<T>> grads) {
  std::vector<T> out;
  for (const auto& g : grads) {
    out.insert(out.end(), g.weight.data(), g.weight.data() + g.weight.size());
    out.insert(out.end(), g.bias.data(), g.bias.data() + g.bias.size());
  }
  return out;
}

/// Pointer to the i-th scalar in declared order (for finite-difference probing).
template <typename T>
T& parameter_at(std::span<DenseLayer<T>> layers, std::size_t index) {
  for (auto& l : layers) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    if (index < nw) return l.weight.data()[index];
    index -= nw;
    const auto nb = static_cast<std::size_t>(l.bias.size());
    if (index < nb) return l.bias.data()[index];
    index -= nb;
  }
  throw std::out_of_range("parameter index out of range");
}

}  // namespace r2l::tensor
