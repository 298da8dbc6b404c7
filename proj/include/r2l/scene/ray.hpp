#pragma once

#include <Eigen/Core>

namespace r2l {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Oriented ray segment; direction is unit length and near < far.
struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3(0, 0, -1);
  double near = 0.0;
  double far = 1.0;

  Vec3 at(double t) const { return origin + t * direction; }
};

/// Throws UsageError when the direction is not unit length (±1e-6) or near ≥ far.
void validate(const Ray& ray);

}  // namespace r2l
