#pragma once

#include <filesystem>
#include <span>

#include <json.hpp>

#include "r2l/common/digest.hpp"
#include "r2l/common/image.hpp"
#include "r2l/scene/camera.hpp"
#include "r2l/student/ray_encoder.hpp"
#include "r2l/student/residual_mlp.hpp"

namespace r2l::student {

/// A light-field network together with the encoder that feeds it.
struct StudentModel {
  RayEncoder encoder;
  ResidualMlp<float> network;
};

/// Fresh model with encoded_dim(encoder) inputs.
StudentModel make_student(const StudentConfig& config, const RayEncoder& encoder, std::uint64_t seed);

/// Rays per network evaluation at inference; the tail chunk is padded so a
/// ray's color does not depend on its neighbors.
inline constexpr std::size_t kStudentChunkRays = 256;

/// Test-mode prediction for arbitrary rays: [R × 3]. The encoder is switched
/// to midpoints regardless of the mode stored in the model.
tensor::Matrix<float> predict_rays(const StudentModel& model, std::span<const Ray> rays, std::size_t threads = 1,
                                   QueryCounter* counter = nullptr);

struct StudentImage {
  Image image;
  std::uint64_t queries = 0;  // one per pixel
};

StudentImage render_image_student(const StudentModel& model, const scene::CameraPose& pose, std::size_t threads = 1);

nlohmann::json to_json(const StudentConfig& config);
StudentConfig parse_student_config(const nlohmann::json& j);

/// Checkpoint with the encoder section filled in; `extra` is echoed in the config.
Sha256 save_student(const StudentModel& model, const std::filesystem::path& path,
                    const nlohmann::json& extra = nlohmann::json::object());

struct LoadedStudent {
  StudentModel model;
  nlohmann::json config;
  Sha256 digest;
};

/// Throws FormatError for corrupt files, other model kinds or shape mismatches.
LoadedStudent load_student(const std::filesystem::path& path);

}  // namespace r2l::student
