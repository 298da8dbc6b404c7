#include "r2l/scene/reference.hpp"

#include <vector>

#include "r2l/common/error.hpp"
#include "r2l/common/parallel.hpp"
#include "r2l/teacher/quadrature.hpp"

namespace r2l::scene {

Rgb reference_render(const BlobScene& scene, const Ray& ray, int n_quad) {
  if (n_quad < 2) throw UsageError("reference_render: n_quad must be ≥ 2");
  using teacher::SamplingMode;
  thread_local std::vector<double> depths, sigma, delta, color;
  depths.resize(n_quad);
  sigma.resize(n_quad);
  delta.resize(n_quad);
  color.resize(3 * static_cast<std::size_t>(n_quad));
  teacher::stratified_depths(ray.near, ray.far, SamplingMode::test, nullptr, depths);
  teacher::interval_lengths(depths, ray.far, delta);
  for (int i = 0; i < n_quad; ++i) {
    const auto f = scene.query(ray.at(depths[i]), ray.direction);
    sigma[i] = f.sigma;
    color[3 * i] = f.color[0];
    color[3 * i + 1] = f.color[1];
    color[3 * i + 2] = f.color[2];
  }
  return teacher::composite_rgb<double>(sigma, delta, color, scene.background());
}

Image reference_image(const BlobScene& scene, const CameraPose& pose, int n_quad, std::size_t threads) {
  validate(pose);
  Image image(pose.width, pose.height);
  parallel_shards(pose.pixel_count(), threads, [&](const ShardRange& shard) {
    for (std::size_t p = shard.begin; p < shard.end; ++p) {
      const int row = static_cast<int>(p / pose.width);
      const int col = static_cast<int>(p % pose.width);
      const auto rgb = reference_render(scene, generate_ray(pose, row, col), n_quad);
      image.set(row, col, {static_cast<float>(rgb[0]), static_cast<float>(rgb[1]), static_cast<float>(rgb[2])});
    }
  });
  return image;
}

std::vector<Image> reference_images(const BlobScene& scene, const std::vector<CameraPose>& poses, int n_quad,
                                    std::size_t threads) {
  std::vector<Image> out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back(reference_image(scene, p, n_quad, threads));
  return out;
}

}  // namespace r2l::scene
