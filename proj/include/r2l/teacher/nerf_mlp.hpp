#pragma once

#include <cstdint>
#include <vector>

#include "r2l/tensor/dense.hpp"
#include "r2l/tensor/tape.hpp"
#include "r2l/teacher/positional_encoding.hpp"

namespace r2l::teacher {

/// Shape of the radiance-field MLP: a relu trunk with one skip concatenation
/// of the encoded position, a softplus density head, and a view-conditioned
/// sigmoid color head.
struct NerfConfig {
  int width = 256;
  int depth = 8;        // trunk layers
  int skip_layer = 5;   // trunk layer whose input is [h, encoded position]
  int view_width = 128;
  PositionalEncoding position{10, true};
  PositionalEncoding direction{4, true};
  double density_bias_init = -1.0;

  std::size_t position_dim() const { return position.output_dim(3); }
  std::size_t direction_dim() const { return direction.output_dim(3); }

  friend bool operator==(const NerfConfig&, const NerfConfig&) = default;
};

/// Throws ConfigError for non-positive sizes or a skip layer outside (0, depth).
void validate(const NerfConfig& config);

template <typename T>
struct NerfOutput {
  tensor::Matrix<T> sigma;  // P × 1, ≥ 0
  tensor::Matrix<T> rgb;    // P × 3, in (0, 1)
};

/// Layer order: trunk[0..depth), density, feature, view, rgb.
template <typename T>
class NerfMlp {
 public:
  NerfMlp() = default;
  NerfMlp(const NerfConfig& config, std::uint64_t seed);

  const NerfConfig& config() const { return config_; }
  std::vector<tensor::DenseLayer<T>>& layers() { return layers_; }
  const std::vector<tensor::DenseLayer<T>>& layers() const { return layers_; }

  std::size_t density_index() const { return static_cast<std::size_t>(config_.depth); }
  std::size_t feature_index() const { return density_index() + 1; }
  std::size_t view_index() const { return density_index() + 2; }
  std::size_t rgb_index() const { return density_index() + 3; }

  /// Inputs are [P × position_dim] and [P × direction_dim] encodings.
  NerfOutput<T> forward(const tensor::Matrix<T>& positions, const tensor::Matrix<T>& directions) const;
  NerfOutput<T> forward(const tensor::Matrix<T>& positions, const tensor::Matrix<T>& directions,
                        tensor::GradientTape<T>& tape) const;
  /// Accumulates parameter gradients given dL/dσ (P × 1) and dL/dc (P × 3).
  void backward(tensor::GradientTape<T>& tape, const tensor::Matrix<T>& grad_sigma,
                const tensor::Matrix<T>& grad_rgb) const;

  template <typename U>
  NerfMlp<U> cast() const;

 private:
  template <typename Step>
  NerfOutput<T> run(const tensor::Matrix<T>& positions, const tensor::Matrix<T>& directions, Step&& step) const;

  NerfConfig config_;
  std::vector<tensor::DenseLayer<T>> layers_;

  template <typename>
  friend class NerfMlp;
};

}  // namespace r2l::teacher
