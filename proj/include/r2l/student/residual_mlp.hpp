#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "r2l/tensor/dense.hpp"
#include "r2l/tensor/tape.hpp"

namespace r2l::student {

/// Width W and depth D = 2 + 2B (input layer, B two-layer blocks, head).
struct StudentConfig {
  std::string name = "W64D24";
  int width = 64;
  int depth = 24;
  bool residual = true;  // false drops every block's identity skip (ablation)

  int blocks() const { return (depth - 2) / 2; }
  friend bool operator==(const StudentConfig&, const StudentConfig&) = default;
};

/// Named configurations W256D88, W181D88, W256D44, W363D22, or any "W<w>D<d>".
/// Throws ConfigError for an unknown name, odd D, D < 4 or W < 1.
StudentConfig build_config(const std::string& name);
StudentConfig custom_config(int width, int depth);

void validate(const StudentConfig& config);

/// Layer order: input, then (first, second) per block, then head.
/// Block: h ← h + relu(L₂ relu(L₁ h)); head: sigmoid(W h + b).
template <typename T>
class ResidualMlp {
 public:
  ResidualMlp() = default;
  ResidualMlp(const StudentConfig& config, std::size_t input_dim, std::uint64_t seed);

  const StudentConfig& config() const { return config_; }
  std::size_t input_dim() const { return input_dim_; }
  std::vector<tensor::DenseLayer<T>>& layers() { return layers_; }
  const std::vector<tensor::DenseLayer<T>>& layers() const { return layers_; }
  std::size_t parameter_count() const;

  /// [B × input_dim] → [B × 3]; throws ConfigError on a dimension mismatch.
  tensor::Matrix<T> forward(const tensor::Matrix<T>& encoded) const;
  tensor::Matrix<T> forward(const tensor::Matrix<T>& encoded, tensor::GradientTape<T>& tape) const;
  /// Accumulates parameter gradients; returns dL/d(encoded) when requested.
  tensor::Matrix<T> backward(tensor::GradientTape<T>& tape, const tensor::Matrix<T>& grad_rgb,
                             bool need_input_grad = false) const;

  template <typename U>
  ResidualMlp<U> cast() const;

 private:
  template <typename Step>
  tensor::Matrix<T> run(const tensor::Matrix<T>& encoded, Step&& step) const;

  StudentConfig config_;
  std::size_t input_dim_ = 0;
  std::vector<tensor::DenseLayer<T>> layers_;

  template <typename>
  friend class ResidualMlp;
};

/// Counts network evaluations (one per ray).
struct QueryCounter {
  std::atomic<std::uint64_t> queries{0};
};

/// One forward pass per row of `encoded`; adds the row count to `counter`.
template <typename T>
tensor::Matrix<T> student_forward(const ResidualMlp<T>& model, const tensor::Matrix<T>& encoded,
                                  QueryCounter* counter = nullptr);

}  // namespace r2l::student
