#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "r2l/scene/blob_scene.hpp"
#include "r2l/scene/camera.hpp"

namespace r2l::scene {

/// Everything a scene description file holds.
struct SceneDescription {
  BlobScene scene = default_blob_scene();
  OrbitConfig orbit;
  int train_views = 40;
  int test_views = 10;
  std::uint64_t train_seed = 1;
  std::uint64_t test_seed = 2;
  /// Added to the test orbit's azimuth start so no test pose coincides with pose 0 of the train split.
  double test_azimuth_offset_deg = 17.0;
};

/// JSON text: {"background": [r,g,b], "blobs": [{center, scale, peak_density,
/// albedo, view_dependence, lobe}], "orbit": {...}, "resolution": [w, h],
/// "near": n, "far": f, "train_views", "test_views", "train_seed", "test_seed"}.
/// Missing keys keep their defaults.
SceneDescription parse_scene_description(const nlohmann::json& j);
SceneDescription load_scene_description(const std::filesystem::path& path);
nlohmann::json to_json(const SceneDescription& desc);

std::vector<CameraPose> train_poses(const SceneDescription& desc);
std::vector<CameraPose> test_poses(const SceneDescription& desc);

}  // namespace r2l::scene
