#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "r2l/common/image.hpp"
#include "r2l/scene/camera.hpp"
#include "r2l/teacher/nerf_mlp.hpp"
#include "r2l/teacher/quadrature.hpp"

namespace r2l::teacher {

using Background = std::array<float, 3>;

/// A posed image used for supervision or evaluation.
struct View {
  scene::CameraPose pose;
  Image image;
};

struct TeacherConfig {
  NerfConfig network;
  int samples_per_ray = 192;
  int batch_rays = 1024;
  std::int64_t iterations = 100000;
  double base_lr = 5e-4;
  Background background{1.0f, 1.0f, 1.0f};
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  int log_every = 100;
  int eval_every = 0;       // 0 disables periodic PSNR
  int eval_rays = 1024;     // fixed pixel subset per split used for periodic PSNR
  std::filesystem::path checkpoint_path;  // empty disables checkpointing
  int checkpoint_every = 0;
};

void validate(const TeacherConfig& config);

struct TeacherLogEntry {
  std::int64_t iteration = 0;
  double loss = 0.0;
  double lr = 0.0;
  double train_psnr = std::numeric_limits<double>::quiet_NaN();
  double test_psnr = std::numeric_limits<double>::quiet_NaN();
};

struct TeacherRun {
  NerfMlp<float> model;
  std::vector<TeacherLogEntry> log;
  std::int64_t rejected_steps = 0;
  double seconds = 0.0;
};

/// Minimizes the MSE between composited rays (stratified train-mode depths)
/// and training pixels. Throws TrainingDiverged on a non-finite loss; the last
/// checkpoint written (if any) is left untouched.
TeacherRun train_teacher(const std::vector<View>& train, const std::vector<View>& test, const TeacherConfig& config,
                         std::ostream* progress = nullptr);

/// Rays per network evaluation during rendering. Every chunk is evaluated with
/// exactly this many rows (the tail is padded) so a ray's color does not
/// depend on its neighbors.
inline constexpr std::size_t kRenderChunkRays = 16;

/// Test-mode (bin midpoint) rendering of arbitrary rays; returns [R × 3].
tensor::Matrix<float> render_rays(const NerfMlp<float>& model, std::span<const Ray> rays, int samples_per_ray,
                                  const Background& background, std::size_t threads = 1);

struct TeacherImage {
  Image image;
  std::uint64_t queries = 0;  // network evaluations = pixels × samples_per_ray
};

TeacherImage render_image(const NerfMlp<float>& model, const scene::CameraPose& pose, int samples_per_ray,
                          const Background& background, std::size_t threads = 1);

/// Network inputs for rays × samples: encoded positions, encoded directions
/// (repeated per sample) and interval lengths; row r·N + i is sample i of ray r.
template <typename T>
struct SampleBatch {
  tensor::Matrix<T> positions;
  tensor::Matrix<T> directions;
  std::vector<T> delta;
};

template <typename T>
void build_sample_batch(const NerfConfig& config, std::span<const Ray> rays, int samples_per_ray, SamplingMode mode,
                        Rng* rng, SampleBatch<T>& out);

/// Composites network outputs into [R × 3] colors.
template <typename T>
tensor::Matrix<T> composite_batch(const NerfOutput<T>& out, const std::vector<T>& delta, int samples_per_ray,
                                  const std::array<T, 3>& background);

}  // namespace r2l::teacher
