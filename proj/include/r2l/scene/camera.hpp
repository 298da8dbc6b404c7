#pragma once

#include <cstdint>
#include <vector>

#include "r2l/scene/ray.hpp"

namespace r2l::scene {

/// Pinhole camera. `rotation` maps camera to world; the camera looks down its
/// local −z axis with +x right and +y up.
struct CameraPose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  double focal = 1.0;  // pixels
  int width = 1;
  int height = 1;
  double near = 0.1;
  double far = 1.0;

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Throws UsageError on non-orthonormal rotation (1e-6) or bad near/far.
void validate(const CameraPose& pose);

/// Ray through the center of pixel (row, col).
Ray generate_ray(const CameraPose& pose, int row, int col);

/// All pixel rays of a pose in row-major order.
std::vector<Ray> generate_rays(const CameraPose& pose);

/// Poses on a spherical band around the origin, all looking at the origin.
struct OrbitConfig {
  double radius = 4.0;
  double elevation_start_deg = 30.0;
  double elevation_min_deg = 15.0;
  double elevation_max_deg = 45.0;
  double azimuth_start_deg = 0.0;
  double focal = 90.0;
  int width = 64;
  int height = 64;
  double near = 2.0;
  double far = 6.0;
};

CameraPose look_at_origin(const OrbitConfig& orbit, double elevation_deg, double azimuth_deg);

/// Pose 0 sits at (elevation_start, azimuth_start). Pose k > 0 takes azimuth
/// stratum k of n with a seeded jitter inside the stratum, and a seeded
/// elevation in [elevation_min, elevation_max]. Deterministic per seed.
std::vector<CameraPose> sample_poses(const OrbitConfig& orbit, int n, std::uint64_t seed);

}  // namespace r2l::scene
