#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "r2l/common/error.hpp"
#include "r2l/tensor/dense.hpp"

namespace r2l::tensor {

/// Forward intermediates for one batch plus gradient buffers aligned 1:1 with
/// a network's layer list. Gradients accumulate across backward calls until
/// zero_grad(); a recorded forward may be consumed by exactly one backward.
template <typename T>
class GradientTape {
 public:
  GradientTape() = default;
  explicit GradientTape(std::span<const DenseLayer<T>> layers) { bind(layers); }

  void bind(std::span<const DenseLayer<T>> layers) {
    caches_.assign(layers.size(), {});
    grads_.clear();
    grads_.reserve(layers.size());
    for (const auto& l : layers) grads_.emplace_back(l);
    recorded_ = false;
  }

  std::size_t size() const { return grads_.size(); }

  void zero_grad() {
    for (auto& g : grads_) g.set_zero();
  }

  /// Called by a network's forward(…, tape) before filling caches.
  void begin_record(std::size_t layer_count) {
    if (layer_count != grads_.size()) throw UsageError("tape bound to a different network");
    recorded_ = true;
  }

  /// Called by a network's backward; throws if nothing was recorded.
  void consume() {
    if (!recorded_) throw UsageError("backward called without a recorded forward pass");
    recorded_ = false;
  }

  bool recorded() const { return recorded_; }

  DenseCache<T>& cache(std::size_t i) { return caches_.at(i); }
  const DenseCache<T>& cache(std::size_t i) const { return caches_.at(i); }
  DenseGrad<T>& grad(std::size_t i) { return grads_.at(i); }
  const DenseGrad<T>& grad(std::size_t i) const { return grads_.at(i); }

  std::span<DenseGrad<T>> grads() { return grads_; }
  std::span<const DenseGrad<T>> grads() const { return grads_; }

  /// Frees forward intermediates (keeps gradients).
  void release_caches() {
    for (auto& c : caches_) c = {};
  }

 private:
  std::vector<DenseCache<T>> caches_;
  std::vector<DenseGrad<T>> grads_;
  bool recorded_ = false;
};

/// grads_into[i] += grads_from[i] for every layer, in index order.
template <typename T>
void accumulate(std::span<DenseGrad<T>> into, std::span<const DenseGrad<T>> from) {
  if (into.size() != from.size()) throw UsageError("gradient lists differ in length");
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

}  // namespace r2l::tensor
