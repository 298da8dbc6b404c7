#pragma once

#include <filesystem>

#include <json.hpp>

#include "r2l/common/digest.hpp"
#include "r2l/teacher/teacher.hpp"

namespace r2l::teacher {

nlohmann::json to_json(const NerfConfig& config);
nlohmann::json to_json(const TeacherConfig& config);

/// Missing keys keep their defaults; malformed values throw ConfigError.
NerfConfig parse_nerf_config(const nlohmann::json& j);
TeacherConfig parse_teacher_config(const nlohmann::json& j);

/// Writes the teacher weights and configuration; returns the file digest.
Sha256 save_teacher(const NerfMlp<float>& model, const TeacherConfig& config, const std::filesystem::path& path);

struct LoadedTeacher {
  NerfMlp<float> model;
  TeacherConfig config;
  Sha256 digest;
};

/// Throws FormatError for a corrupt file or a checkpoint of another kind.
LoadedTeacher load_teacher(const std::filesystem::path& path);

}  // namespace r2l::teacher
