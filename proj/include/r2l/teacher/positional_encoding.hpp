#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace r2l::teacher {

/// Per scalar p: [p], sin(2⁰πp), cos(2⁰πp), …, sin(2^{L−1}πp), cos(2^{L−1}πp).
/// Scalars are laid out one block after another.
struct PositionalEncoding {
  int octaves = 10;
  bool include_raw = true;

  std::size_t dim_per_scalar() const { return 2 * static_cast<std::size_t>(octaves) + (include_raw ? 1 : 0); }
  std::size_t output_dim(std::size_t scalars) const { return scalars * dim_per_scalar(); }

  friend bool operator==(const PositionalEncoding&, const PositionalEncoding&) = default;
};

/// Writes output_dim(v.size()) values. Higher octaves come from the
/// double-angle recurrence in double precision (agrees with std::sin/std::cos
/// to ~1e-13 for L ≤ 16).
template <typename T>
void encode(const PositionalEncoding& pe, std::span<const double> v, std::span<T> out);

std::vector<double> encode(const PositionalEncoding& pe, std::span<const double> v);

}  // namespace r2l::teacher
