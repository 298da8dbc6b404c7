#include "r2l/scene/scene_file.hpp"

#include <fstream>

#include "r2l/common/error.hpp"

namespace r2l::scene {

using nlohmann::json;

namespace {

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Rgb rgb_from(const json& j) {
  const Vec3 v = vec3_from(j);
  return {v.x(), v.y(), v.z()};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Rgb& c) { return json::array({c[0], c[1], c[2]}); }

Blob blob_from(const json& j) {
  Blob b;
  b.center = vec3_from(j.at("center"));
  b.scale = j.at("scale").get<double>();
  b.peak_density = j.at("peak_density").get<double>();
  b.albedo = rgb_from(j.at("albedo"));
  b.view_dependence = j.value("view_dependence", 0.0);
  if (j.contains("lobe")) b.lobe = vec3_from(j.at("lobe")).normalized();
  return b;
}

}  // namespace

SceneDescription parse_scene_description(const json& j) {
  try {
    SceneDescription d;
    if (j.contains("blobs") || j.contains("background")) {
      std::vector<Blob> blobs = d.scene.blobs();
      if (j.contains("blobs")) {
        blobs.clear();
        for (const auto& b : j.at("blobs")) blobs.push_back(blob_from(b));
      }
      const Rgb bg = j.contains("background") ? rgb_from(j.at("background")) : d.scene.background();
      d.scene = BlobScene(std::move(blobs), bg);
    }
    if (j.contains("orbit")) {
      const auto& o = j.at("orbit");
      d.orbit.radius = o.value("radius", d.orbit.radius);
      d.orbit.elevation_start_deg = o.value("elevation_start_deg", d.orbit.elevation_start_deg);
      d.orbit.elevation_min_deg = o.value("elevation_min_deg", d.orbit.elevation_min_deg);
      d.orbit.elevation_max_deg = o.value("elevation_max_deg", d.orbit.elevation_max_deg);
      d.orbit.azimuth_start_deg = o.value("azimuth_start_deg", d.orbit.azimuth_start_deg);
      d.orbit.focal = o.value("focal", d.orbit.focal);
    }
    if (j.contains("resolution")) {
      d.orbit.width = j.at("resolution").at(0).get<int>();
      d.orbit.height = j.at("resolution").at(1).get<int>();
    }
    d.orbit.near = j.value("near", d.orbit.near);
    d.orbit.far = j.value("far", d.orbit.far);
    d.train_views = j.value("train_views", d.train_views);
    d.test_views = j.value("test_views", d.test_views);
    d.train_seed = j.value("train_seed", d.train_seed);
    d.test_seed = j.value("test_seed", d.test_seed);
    d.test_azimuth_offset_deg = j.value("test_azimuth_offset_deg", d.test_azimuth_offset_deg);
    if (!(d.orbit.near > 0.0 && d.orbit.near < d.orbit.far)) throw ConfigError("scene needs 0 < near < far");
    if (d.orbit.width < 1 || d.orbit.height < 1) throw ConfigError("resolution must be positive");
    if (d.train_views < 1 || d.test_views < 1) throw ConfigError("need at least one train and one test view");
    return d;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scene description: ") + e.what());
  }
}

SceneDescription load_scene_description(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scene file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_scene_description(j);
}

json to_json(const SceneDescription& d) {
  json blobs = json::array();
  for (const auto& b : d.scene.blobs()) {
    blobs.push_back({{"center", to_json(b.center)},
                     {"scale", b.scale},
                     {"peak_density", b.peak_density},
                     {"albedo", to_json(b.albedo)},
                     {"view_dependence", b.view_dependence},
                     {"lobe", to_json(b.lobe)}});
  }
  return {{"background", to_json(d.scene.background())},
          {"blobs", blobs},
          {"orbit",
           {{"radius", d.orbit.radius},
            {"elevation_start_deg", d.orbit.elevation_start_deg},
            {"elevation_min_deg", d.orbit.elevation_min_deg},
            {"elevation_max_deg", d.orbit.elevation_max_deg},
            {"azimuth_start_deg", d.orbit.azimuth_start_deg},
            {"focal", d.orbit.focal}}},
          {"resolution", {d.orbit.width, d.orbit.height}},
          {"near", d.orbit.near},
          {"far", d.orbit.far},
          {"train_views", d.train_views},
          {"test_views", d.test_views},
          {"train_seed", d.train_seed},
          {"test_seed", d.test_seed},
          {"test_azimuth_offset_deg", d.test_azimuth_offset_deg}};
}

std::vector<CameraPose> train_poses(const SceneDescription& desc) {
  return sample_poses(desc.orbit, desc.train_views, desc.train_seed);
}

std::vector<CameraPose> test_poses(const SceneDescription& desc) {
  OrbitConfig orbit = desc.orbit;
  orbit.azimuth_start_deg += desc.test_azimuth_offset_deg;
  return sample_poses(orbit, desc.test_views, desc.test_seed);
}

}  // namespace r2l::scene
