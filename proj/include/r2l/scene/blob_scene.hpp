#pragma once

#include <array>
#include <vector>

#include "r2l/scene/ray.hpp"

namespace r2l::scene {

using Rgb = std::array<double, 3>;

struct Blob {
  Vec3 center = Vec3::Zero();
  double scale = 1.0;        // Gaussian standard deviation, scene units
  double peak_density = 0.0; // σ_max, 1/length
  Rgb albedo{0.5, 0.5, 0.5};
  double view_dependence = 0.0;  // κ in [0, 1]
  Vec3 lobe = Vec3(0, 0, 1);     // unit
};

struct FieldSample {
  double sigma = 0.0;
  Rgb color{0, 0, 0};
};

/// Immutable analytic volume: a sum of isotropic Gaussian density blobs with
/// density-weighted colors and a squared clamped-cosine view lobe.
class BlobScene {
 public:
  BlobScene(std::vector<Blob> blobs, Rgb background);

  const std::vector<Blob>& blobs() const { return blobs_; }
  const Rgb& background() const { return background_; }

  /// σ(p) = Σ σ_max·exp(−‖p − center‖² / 2 scale²); color is the σ-weighted
  /// mix of albedo·(1 − κ + κ·max(0, d·lobe))², background where σ = 0.
  FieldSample query(const Vec3& point, const Vec3& view_dir) const;

  double density(const Vec3& point) const;

 private:
  std::vector<Blob> blobs_;
  Rgb background_;
};

inline FieldSample query_field(const BlobScene& scene, const Vec3& point, const Vec3& view_dir) {
  return scene.query(point, view_dir);
}

/// Default desk-scale scene: five overlapping blobs, two of them glossy.
BlobScene default_blob_scene();

}  // namespace r2l::scene
