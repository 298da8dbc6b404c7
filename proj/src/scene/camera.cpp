#include "r2l/scene/camera.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "r2l/common/error.hpp"
#include "r2l/common/rng.hpp"

namespace r2l::scene {

void validate(const CameraPose& pose) {
  if ((pose.rotation.transpose() * pose.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
    throw UsageError("camera rotation is not orthonormal");
  }
  if (!(pose.near > 0.0 && pose.near < pose.far)) throw UsageError("camera needs 0 < near < far");
  if (pose.width < 1 || pose.height < 1 || !(pose.focal > 0.0)) throw UsageError("bad camera intrinsics");
}

Ray generate_ray(const CameraPose& pose, int row, int col) {
  if (row < 0 || row >= pose.height || col < 0 || col >= pose.width) {
    throw UsageError("pixel (" + std::to_string(row) + ", " + std::to_string(col) + ") outside image");
  }
  const double x = (col + 0.5 - 0.5 * pose.width) / pose.focal;
  const double y = -(row + 0.5 - 0.5 * pose.height) / pose.focal;
  Ray ray;
  ray.origin = pose.position;
  ray.direction = (pose.rotation * Vec3(x, y, -1.0)).normalized();
  ray.near = pose.near;
  ray.far = pose.far;
  return ray;
}

std::vector<Ray> generate_rays(const CameraPose& pose) {
  std::vector<Ray> rays;
  rays.reserve(pose.pixel_count());
  for (int r = 0; r < pose.height; ++r) {
    for (int c = 0; c < pose.width; ++c) rays.push_back(generate_ray(pose, r, c));
  }
  return rays;
}

CameraPose look_at_origin(const OrbitConfig& orbit, double elevation_deg, double azimuth_deg) {
  const double el = elevation_deg * std::numbers::pi / 180.0;
  const double az = azimuth_deg * std::numbers::pi / 180.0;
  CameraPose pose;
  pose.position = orbit.radius * Vec3(std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az));
  const Vec3 back = pose.position.normalized();
  const Vec3 world_up(0, 1, 0);
  const Vec3 right = world_up.cross(back).normalized();
  const Vec3 up = back.cross(right);
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = up;
  pose.rotation.col(2) = back;
  pose.focal = orbit.focal;
  pose.width = orbit.width;
  pose.height = orbit.height;
  pose.near = orbit.near;
  pose.far = orbit.far;
  return pose;
}

std::vector<CameraPose> sample_poses(const OrbitConfig& orbit, int n, std::uint64_t seed) {
  if (n < 1) throw UsageError("sample_poses: n must be ≥ 1");
  if (std::abs(orbit.elevation_max_deg) >= 89.0 || std::abs(orbit.elevation_min_deg) >= 89.0) {
    throw ConfigError("orbit elevation must stay away from the poles");
  }
  Rng rng(seed);
  std::vector<CameraPose> poses;
  poses.reserve(static_cast<std::size_t>(n));
  poses.push_back(look_at_origin(orbit, orbit.elevation_start_deg, orbit.azimuth_start_deg));
  const double stratum = 360.0 / n;
  for (int k = 1; k < n; ++k) {
    const double az = orbit.azimuth_start_deg + stratum * (k + rng.uniform(-0.4, 0.4));
    const double el = rng.uniform(orbit.elevation_min_deg, orbit.elevation_max_deg);
    poses.push_back(look_at_origin(orbit, el, az));
  }
  return poses;
}

}  // namespace r2l::scene
