#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "r2l/tensor/dense.hpp"

namespace r2l::tensor {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double base_lr = 5e-4;
};

template <typename T>
struct AdamState {
  AdamHyper hyper;
  std::vector<DenseGrad<T>> first_moment;
  std::vector<DenseGrad<T>> second_moment;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(std::span<const DenseLayer<T>> layers, AdamHyper h = {});
};

enum class StepStatus { applied, rejected_non_finite };

/// Bias-corrected Adam on one flat parameter block; `step` is the already
/// incremented step count t ≥ 1. Elementwise, so blocks never interact.
template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads, std::span<T> m, std::span<T> v,
                 std::int64_t step, const AdamHyper& hyper, double lr);

/// One Adam step over a network's layers. A non-finite gradient anywhere
/// rejects the whole step: nothing changes, including the step counter.
template <typename T>
StepStatus adam_step(std::span<DenseLayer<T>> layers, std::span<const DenseGrad<T>> grads, AdamState<T>& state,
                     double lr);

/// η₀ · (1/10)^(step/total): exponential decay to η₀/10 at the last step.
double lr_schedule(std::int64_t step, std::int64_t total_steps, double base_lr);

}  // namespace r2l::tensor
