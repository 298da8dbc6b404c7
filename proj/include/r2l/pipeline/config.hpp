#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "r2l/common/digest.hpp"
#include "r2l/distill/train_student.hpp"
#include "r2l/scene/scene_file.hpp"
#include "r2l/student/ray_encoder.hpp"
#include "r2l/student/residual_mlp.hpp"
#include "r2l/teacher/teacher.hpp"

namespace r2l::pipeline {

struct PseudoSpec {
  double images = 2000;  // pseudo rays = images × pixels per training image
  bool include_real = false;
  int samples_per_ray = 0;  // 0: the teacher's training value
};

struct StudentSpec {
  student::StudentConfig network = student::custom_config(64, 24);
  student::RayEncoder encoder = student::KPointEncoder{};
  distill::StudentTrainConfig train;
};

struct BenchSpec {
  int frames = 60;
  int teacher_samples = 192;
  std::uint64_t pose_seed = 3;
};

/// Everything one end-to-end run needs. Stage seeds are derived from `seed`.
struct ExperimentConfig {
  std::string name = "desk";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  scene::SceneDescription scene;
  int reference_quadrature = 1024;
  teacher::TeacherConfig teacher;
  PseudoSpec pseudo;
  StudentSpec student;
  BenchSpec bench;

  std::uint64_t teacher_seed() const;
  std::uint64_t pseudo_seed() const;
  std::uint64_t student_init_seed() const;
  std::uint64_t student_train_seed() const;
};

/// Desk-scale defaults: 64×64 blob scene, W256 teacher with N = 192, W64D24 K = 16 student.
ExperimentConfig desk_defaults();

nlohmann::json to_json(const student::RayEncoder& encoder);
/// {"kind": "kpoint", "points", "octaves", "include_input"} or {"kind": "plucker", ...}.
student::RayEncoder parse_encoder(const nlohmann::json& j);
nlohmann::json to_json(const distill::StudentTrainConfig& config);
distill::StudentTrainConfig parse_student_train_config(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep the desk defaults. Throws ConfigError for malformed values.
ExperimentConfig parse_experiment(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Copies the run-wide seed and thread count into every stage.
void propagate(ExperimentConfig& config);

/// SHA-256 of the canonical JSON text.
Sha256 config_digest(const ExperimentConfig& config);

}  // namespace r2l::pipeline
