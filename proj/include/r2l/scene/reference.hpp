#pragma once

#include <vector>

#include "r2l/common/image.hpp"
#include "r2l/scene/blob_scene.hpp"
#include "r2l/scene/camera.hpp"

namespace r2l::scene {

/// Sample count used for ground-truth images.
inline constexpr int kReferenceQuadrature = 1024;

/// Alpha-composited quadrature of the analytic field at n_quad evenly spaced
/// (bin-midpoint) depths on [near, far]. n_quad ≥ 2.
Rgb reference_render(const BlobScene& scene, const Ray& ray, int n_quad = kReferenceQuadrature);

Image reference_image(const BlobScene& scene, const CameraPose& pose, int n_quad = kReferenceQuadrature,
                      std::size_t threads = 1);

std::vector<Image> reference_images(const BlobScene& scene, const std::vector<CameraPose>& poses,
                                    int n_quad = kReferenceQuadrature, std::size_t threads = 1);

}  // namespace r2l::scene
