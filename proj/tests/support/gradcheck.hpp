#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "r2l/common/rng.hpp"
#include "r2l/tensor/dense.hpp"
#include "r2l/tensor/loss.hpp"
#include "r2l/tensor/params.hpp"
#include "r2l/tensor/sequential.hpp"

namespace r2l::testing {

/// |a − n| / max(|a|, |n|, floor): relative where gradients are sizeable,
/// absolute (scaled by 1/floor) where both are tiny.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Central difference of f at every coordinate of x (x is restored).
inline std::vector<double> central_difference(std::span<double> x, const std::function<double()>& f,
                                              double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f();
    x[i] = keep - h;
    const double down = f();
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

inline double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) worst = std::max(worst, relative_error(analytic[i], numeric[i]));
  return worst;
}

/// Random Sequential<double>: 1..4 layers, widths 1..32, activations cycled
/// from `first_activation` so every type appears across a sweep.
inline tensor::Sequential<double> random_network(Rng& rng, int first_activation, tensor::Index in_dim) {
  using tensor::Activation;
  constexpr Activation kActs[] = {Activation::identity, Activation::relu, Activation::sigmoid, Activation::softplus};
  const int layers = 1 + static_cast<int>(rng.below(4));
  std::vector<tensor::DenseLayer<double>> stack;
  tensor::Index in = in_dim;
  for (int l = 0; l < layers; ++l) {
    const tensor::Index out = 1 + static_cast<tensor::Index>(rng.below(32));
    stack.emplace_back(in, out, kActs[(first_activation + l) % 4]);
    auto& layer = stack.back();
    for (tensor::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = rng.normal() / std::sqrt(double(in));
    for (tensor::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = 0.1 * rng.normal();
    in = out;
  }
  return tensor::Sequential<double>(std::move(stack));
}

/// Worst relative error of parameter and input gradients of MSE(net(x), y).
inline double network_gradient_error(tensor::Sequential<double>& net, const tensor::Matrix<double>& x,
                                     const tensor::Matrix<double>& y) {
  tensor::GradientTape<double> tape(net.layers());
  const auto pred = net.forward(x, tape);
  const tensor::Matrix<double> gin = net.backward(tape, tensor::mse_loss_grad<double>(pred, y));
  const auto analytic = tensor::flatten_gradients<double>(tape.grads());

  std::vector<double> params = tensor::flatten_parameters<double>(net.layers());
  auto load = [&] {
    for (std::size_t i = 0; i < params.size(); ++i) tensor::parameter_at<double>(net.layers(), i) = params[i];
  };
  const auto numeric = central_difference(params, [&] {
    load();
    return tensor::mse_loss<double>(net.forward(x), y).loss;
  });
  load();
  double worst = max_relative_error(analytic, numeric);

  tensor::Matrix<double> xin = x;
  const auto numeric_in = central_difference(std::span<double>(xin.data(), static_cast<std::size_t>(xin.size())), [&] {
    return tensor::mse_loss<double>(net.forward(xin), y).loss;
  });
  worst = std::max(worst, max_relative_error(std::span<const double>(gin.data(), static_cast<std::size_t>(gin.size())),
                                             numeric_in));
  return worst;
}

}  // namespace r2l::testing
