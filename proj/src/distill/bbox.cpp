#include "r2l/distill/bbox.hpp"

#include "r2l/common/error.hpp"

namespace r2l::distill {

bool RayBoundingBox::contains(const Ray& ray) const {
  return (ray.origin.array() >= origin_min.array()).all() && (ray.origin.array() <= origin_max.array()).all() &&
         (ray.direction.array() >= direction_min.array()).all() &&
         (ray.direction.array() <= direction_max.array()).all();
}

RayBoundingBox infer_bbox(std::span<const Ray> rays) {
  if (rays.empty()) throw UsageError("infer_bbox: no rays");
  RayBoundingBox box{rays[0].origin, rays[0].origin, rays[0].direction, rays[0].direction};
  for (const Ray& r : rays) {
    box.origin_min = box.origin_min.cwiseMin(r.origin);
    box.origin_max = box.origin_max.cwiseMax(r.origin);
    box.direction_min = box.direction_min.cwiseMin(r.direction);
    box.direction_max = box.direction_max.cwiseMax(r.direction);
  }
  return box;
}

void validate(const RayBoundingBox& box) {
  if (!(box.origin_min.array() <= box.origin_max.array()).all() ||
      !(box.direction_min.array() <= box.direction_max.array()).all()) {
    throw ConfigError("ray bounding box has min > max");
  }
}

Vec3 uniform_in_box(const Vec3& lo, const Vec3& hi, Rng& rng) {
  return Vec3(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()), rng.uniform(lo.z(), hi.z()));
}

std::vector<Ray> sample_pseudo_rays(const RayBoundingBox& box, std::size_t n, double near, double far, Rng& rng) {
  validate(box);
  if (!(near < far)) throw ConfigError("pseudo rays need near < far");
  constexpr int kMaxRejects = 1000;
  auto draw = [&](const Vec3& lo, const Vec3& hi) { return uniform_in_box(lo, hi, rng); };
  std::vector<Ray> rays;
  rays.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Ray ray;
    ray.near = near;
    ray.far = far;
    ray.origin = draw(box.origin_min, box.origin_max);
    int rejects = 0;
    for (;;) {
      const Vec3 d = draw(box.direction_min, box.direction_max);
      const double norm = d.norm();
      if (norm > 1e-9) {
        ray.direction = d / norm;
        break;
      }
      if (++rejects >= kMaxRejects) throw ConfigError("direction box only yields zero-length directions");
    }
    rays.push_back(ray);
  }
  return rays;
}

}  // namespace r2l::distill
