#include "r2l/scene/blob_scene.hpp"

#include <algorithm>
#include <cmath>

#include "r2l/common/error.hpp"

namespace r2l {

void validate(const Ray& ray) {
  if (std::abs(ray.direction.norm() - 1.0) > 1e-6) throw UsageError("ray direction is not unit length");
  if (!(ray.near < ray.far)) throw UsageError("ray near must be < far");
}

}  // namespace r2l

namespace r2l::scene {

namespace {
bool in_unit_range(const Rgb& c) {
  return std::all_of(c.begin(), c.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}
}  // namespace

BlobScene::BlobScene(std::vector<Blob> blobs, Rgb background) : blobs_(std::move(blobs)), background_(background) {
  if (blobs_.empty()) throw ConfigError("a blob scene needs at least one blob");
  if (!in_unit_range(background_)) throw ConfigError("background color outside [0,1]");
  for (const auto& b : blobs_) {
    if (!(b.scale > 0.0)) throw ConfigError("blob scale must be > 0");
    if (!(b.peak_density >= 0.0)) throw ConfigError("blob peak density must be ≥ 0");
    if (!in_unit_range(b.albedo)) throw ConfigError("blob albedo outside [0,1]");
    if (b.view_dependence < 0.0 || b.view_dependence > 1.0) throw ConfigError("view dependence outside [0,1]");
    if (std::abs(b.lobe.norm() - 1.0) > 1e-6) throw ConfigError("blob lobe direction must be unit length");
  }
}

double BlobScene::density(const Vec3& point) const {
  double sigma = 0.0;
  for (const auto& b : blobs_) {
    const double r2 = (point - b.center).squaredNorm();
    sigma += b.peak_density * std::exp(-r2 / (2.0 * b.scale * b.scale));
  }
  return sigma;
}

FieldSample BlobScene::query(const Vec3& point, const Vec3& view_dir) const {
  FieldSample out;
  Rgb weighted{0, 0, 0};
  for (const auto& b : blobs_) {
    const double r2 = (point - b.center).squaredNorm();
    const double s = b.peak_density * std::exp(-r2 / (2.0 * b.scale * b.scale));
    const double lobe = 1.0 - b.view_dependence + b.view_dependence * std::max(0.0, view_dir.dot(b.lobe));
    const double shade = lobe * lobe;
    for (int c = 0; c < 3; ++c) weighted[c] += s * b.albedo[c] * shade;
    out.sigma += s;
  }
  if (out.sigma > 0.0) {
    for (int c = 0; c < 3; ++c) out.color[c] = std::clamp(weighted[c] / out.sigma, 0.0, 1.0);
  } else {
    out.color = background_;
  }
  return out;
}

BlobScene default_blob_scene() {
  std::vector<Blob> blobs;
  blobs.push_back({Vec3(0.0, 0.0, 0.0), 0.45, 40.0, {0.85, 0.25, 0.20}, 0.0, Vec3(0, 0, 1)});
  blobs.push_back({Vec3(0.55, 0.35, 0.2), 0.30, 30.0, {0.20, 0.60, 0.90}, 0.6, Vec3(1, 1, 0).normalized()});
  blobs.push_back({Vec3(-0.5, -0.2, 0.45), 0.35, 25.0, {0.30, 0.80, 0.30}, 0.0, Vec3(0, 0, 1)});
  blobs.push_back({Vec3(0.1, -0.45, -0.5), 0.30, 35.0, {0.95, 0.85, 0.30}, 0.8, Vec3(0, 0, -1)});
  blobs.push_back({Vec3(-0.3, 0.5, -0.35), 0.25, 20.0, {0.70, 0.40, 0.80}, 0.0, Vec3(0, 0, 1)});
  return BlobScene(std::move(blobs), {1.0, 1.0, 1.0});
}

}  // namespace r2l::scene
