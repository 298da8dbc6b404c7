#pragma once

#include <array>
#include <span>
#include <variant>
#include <vector>

#include "r2l/common/checkpoint.hpp"
#include "r2l/common/rng.hpp"
#include "r2l/scene/ray.hpp"
#include "r2l/teacher/positional_encoding.hpp"
#include "r2l/teacher/quadrature.hpp"
#include "r2l/tensor/matrix.hpp"

namespace r2l::student {

using teacher::PositionalEncoding;
using teacher::SamplingMode;

/// K points along the ray (stratified or bin midpoints), concatenated in depth
/// order and positionally encoded.
struct KPointEncoder {
  int points = 16;
  PositionalEncoding encoding{10, true};
  SamplingMode mode = SamplingMode::test;

  friend bool operator==(const KPointEncoder&, const KPointEncoder&) = default;
};

/// Encoded Plücker coordinates (d, o × d).
struct PluckerEncoder {
  PositionalEncoding encoding{10, true};

  friend bool operator==(const PluckerEncoder&, const PluckerEncoder&) = default;
};

using RayEncoder = std::variant<KPointEncoder, PluckerEncoder>;

/// Throws ConfigError when K < 2 or L < 0.
void validate(const RayEncoder& encoder);

/// K-point: 3K·(2L + raw); Plücker: 6·(2L + raw).
std::size_t encoded_dim(const RayEncoder& encoder);

/// Returns a copy with the sampling mode replaced (no-op for Plücker).
RayEncoder with_mode(const RayEncoder& encoder, SamplingMode mode);

/// The 3K raw coordinates fed to the encoding. `rng` is required in train mode.
std::vector<double> ray_points(const KPointEncoder& encoder, const Ray& ray, Rng* rng);

/// (d, o × d) with the moment computed in double precision.
std::array<double, 6> plucker_coordinates(const Ray& ray);

/// Writes encoded_dim(encoder) values into `out`. Throws UsageError for a
/// train-mode K-point encoder without an rng.
template <typename T>
void encode_ray(const RayEncoder& encoder, const Ray& ray, Rng* rng, std::span<T> out);

/// Encodes rays into the rows of a [R × encoded_dim] matrix.
template <typename T>
tensor::Matrix<T> encode_rays(const RayEncoder& encoder, std::span<const Ray> rays, Rng* rng);

EncoderSection to_section(const RayEncoder& encoder);
/// Throws FormatError on an unknown encoder kind.
RayEncoder from_section(const EncoderSection& section);

}  // namespace r2l::student
