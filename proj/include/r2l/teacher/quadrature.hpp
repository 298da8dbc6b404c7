#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "r2l/common/rng.hpp"

namespace r2l::teacher {

enum class SamplingMode { train, test };

/// N depths in [near, far]: one uniform draw per equal bin (train) or the bin
/// midpoints (test). `rng` is only consulted in train mode.
std::vector<double> stratified_depths(double near, double far, int n, SamplingMode mode, Rng* rng = nullptr);

/// Writes into `out` (size n) without allocating.
void stratified_depths(double near, double far, SamplingMode mode, Rng* rng, std::span<double> out);

/// Interval lengths δ_i = t_{i+1} − t_i, last δ = far − t_N.
void interval_lengths(std::span<const double> depths, double far, std::span<double> out);

/// One ray's samples: depths ascending, δ_i > 0, per-sample σ_i and c_i.
template <typename T>
struct QuadratureSamples {
  std::vector<T> sigma;
  std::vector<T> delta;
  std::vector<std::array<T, 3>> color;

  std::size_t size() const { return sigma.size(); }
};

template <typename T>
struct CompositeResult {
  std::array<T, 3> rgb{};
  std::vector<T> weights;      // w_i = T_i α_i
  std::vector<T> transmittance;  // T_i = Π_{j<i}(1 − α_j)
  T opacity = 0;               // Σ w_i
};

/// α_i = 1 − exp(−σ_i δ_i); T_i = Π_{j<i}(1 − α_j); w_i = T_i α_i;
/// rgb = Σ w_i c_i + (1 − Σ w_i)·background.
template <typename T>
CompositeResult<T> composite_ray(const QuadratureSamples<T>& samples, const std::array<T, 3>& background);

/// Allocation-free variant for hot loops; returns rgb. Same arithmetic as composite_ray.
template <typename T>
std::array<T, 3> composite_rgb(std::span<const T> sigma, std::span<const T> delta, std::span<const T> color_rows,
                               const std::array<T, 3>& background);

/// Partial composite of a segment without background: (Σ w_i c_i, final transmittance).
/// Chaining segments s1, s2: rgb = c1 + T1·c2 + T1·T2·background.
template <typename T>
struct SegmentComposite {
  std::array<T, 3> rgb{};
  T transmittance = 1;
};

template <typename T>
SegmentComposite<T> composite_segment(const QuadratureSamples<T>& samples);

/// Reverse-mode through composite_ray: given dL/d(rgb), writes dL/dσ_i and
/// dL/dc_i (row-major, 3 per sample). Uses a backward recurrence that never
/// divides by (1 − α).
template <typename T>
void composite_backward(std::span<const T> sigma, std::span<const T> delta, std::span<const T> color_rows,
                        const std::array<T, 3>& background, const std::array<T, 3>& grad_rgb,
                        std::span<T> grad_sigma, std::span<T> grad_color_rows);

}  // namespace r2l::teacher
