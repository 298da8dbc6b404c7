#pragma once

#include <span>
#include <vector>

#include "r2l/common/rng.hpp"
#include "r2l/scene/ray.hpp"

namespace r2l::distill {

/// Componentwise bounds of ray origins and unit directions.
struct RayBoundingBox {
  Vec3 origin_min = Vec3::Zero();
  Vec3 origin_max = Vec3::Zero();
  Vec3 direction_min = Vec3(0, 0, -1);
  Vec3 direction_max = Vec3(0, 0, -1);

  bool contains(const Ray& ray) const;
  friend bool operator==(const RayBoundingBox&, const RayBoundingBox&) = default;
};

/// Exact min/max over the rays (no margin). Throws UsageError when empty.
RayBoundingBox infer_bbox(std::span<const Ray> rays);

/// Throws ConfigError when any min exceeds its max.
void validate(const RayBoundingBox& box);

/// Componentwise uniform point of [lo, hi]; x, y, z drawn in that order.
Vec3 uniform_in_box(const Vec3& lo, const Vec3& hi, Rng& rng);

/// Per ray: origin = uniform_in_box(origin box), then direction draws until one
/// has norm > 1e-9, renormalized. 1000 consecutive rejects throw ConfigError.
std::vector<Ray> sample_pseudo_rays(const RayBoundingBox& box, std::size_t n, double near, double far, Rng& rng);

}  // namespace r2l::distill
