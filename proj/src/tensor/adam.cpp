#include "r2l/tensor/adam.hpp"

#include <cmath>

#include "r2l/common/error.hpp"

namespace r2l::tensor {

template <typename T>
AdamState<T>::AdamState(std::span<const DenseLayer<T>> layers, AdamHyper h) : hyper(h) {
  first_moment.reserve(layers.size());
  second_moment.reserve(layers.size());
  for (const auto& l : layers) {
    first_moment.emplace_back(l);
    second_moment.emplace_back(l);
  }
}

template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads, std::span<T> m, std::span<T> v,
                 std::int64_t step, const AdamHyper& hyper, double lr) {
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
    throw UsageError("adam_update: buffer sizes differ");
  }
  if (step < 1) throw UsageError("adam_update: step must be ≥ 1");
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
  const T b1 = static_cast<T>(hyper.beta1);
  const T b2 = static_cast<T>(hyper.beta2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = grads[i];
    m[i] = b1 * m[i] + (T(1) - b1) * g;
    v[i] = b2 * v[i] + (T(1) - b2) * g * g;
    const double m_hat = static_cast<double>(m[i]) / bc1;
    const double v_hat = static_cast<double>(v[i]) / bc2;
    params[i] -= static_cast<T>(lr * m_hat / (std::sqrt(v_hat) + hyper.epsilon));
  }
}

namespace {
template <typename T>
std::span<T> span_of(auto& eigen_obj) {
  return {eigen_obj.data(), static_cast<std::size_t>(eigen_obj.size())};
}
template <typename T>
std::span<const T> cspan_of(const auto& eigen_obj) {
  return {eigen_obj.data(), static_cast<std::size_t>(eigen_obj.size())};
}
}  // namespace

template <typename T>
StepStatus adam_step(std::span<DenseLayer<T>> layers, std::span<const DenseGrad<T>> grads, AdamState<T>& state,
                     double lr) {
  if (!(lr > 0.0)) throw ConfigError("adam_step: learning rate must be positive");
  if (grads.size() != layers.size() || state.first_moment.size() != layers.size()) {
    throw UsageError("adam_step: parameter, gradient and state lists differ in length");
  }
  for (const auto& g : grads) {
    if (!g.all_finite()) return StepStatus::rejected_non_finite;
  }
  const std::int64_t t = state.step + 1;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    adam_update<T>(span_of<T>(layers[i].weight), cspan_of<T>(grads[i].weight), span_of<T>(state.first_moment[i].weight),
                   span_of<T>(state.second_moment[i].weight), t, state.hyper, lr);
    adam_update<T>(span_of<T>(layers[i].bias), cspan_of<T>(grads[i].bias), span_of<T>(state.first_moment[i].bias),
                   span_of<T>(state.second_moment[i].bias), t, state.hyper, lr);
  }
  state.step = t;
  return StepStatus::applied;
}

double lr_schedule(std::int64_t step, std::int64_t total_steps, double base_lr) {
  if (total_steps <= 0) return base_lr;
  if (step < 0 || step > total_steps) throw UsageError("lr_schedule: step outside [0, total_steps]");
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
  return base_lr * std::pow(0.1, frac);
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_update<float>(std::span<float>, std::span<const float>, std::span<float>, std::span<float>,
                                 std::int64_t, const AdamHyper&, double);
template void adam_update<double>(std::span<double>, std::span<const double>, std::span<double>,
                                  std::span<double>, std::int64_t, const AdamHyper&, double);
template StepStatus adam_step<float>(std::span<DenseLayer<float>>, std::span<const DenseGrad<float>>,
                                     AdamState<float>&, double);
template StepStatus adam_step<double>(std::span<DenseLayer<double>>, std::span<const DenseGrad<double>>,
                                      AdamState<double>&, double);

}  // namespace r2l::tensor
