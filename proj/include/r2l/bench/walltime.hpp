#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "r2l/scene/camera.hpp"
#include "r2l/student/student.hpp"
#include "r2l/teacher/teacher.hpp"

namespace r2l::bench {

struct BenchResult {
  std::string label;
  std::size_t frames = 0;
  std::size_t threads = 1;
  std::uint64_t rays = 0;  // timed rays
  double seconds_total = 0.0;
  double seconds_per_frame = 0.0;
  double microseconds_per_ray = 0.0;
  std::string digest;  // model checkpoint digest, when known
};

/// Renders every pose once after one untimed warm-up frame (pose 0).
/// `render` must render a full frame. Throws UsageError for an empty pose set.
BenchResult bench_walltime(const std::string& label, const std::vector<scene::CameraPose>& poses, std::size_t threads,
                           const std::function<void(const scene::CameraPose&)>& render);

BenchResult bench_student(const student::StudentModel& model, const std::vector<scene::CameraPose>& poses,
                          std::size_t threads);
BenchResult bench_teacher(const teacher::NerfMlp<float>& model, int samples_per_ray,
                          const teacher::Background& background, const std::vector<scene::CameraPose>& poses,
                          std::size_t threads);

nlohmann::json to_json(const BenchResult& result);

}  // namespace r2l::bench
