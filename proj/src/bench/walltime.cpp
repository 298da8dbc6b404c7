#include "r2l/bench/walltime.hpp"

#include <chrono>

#include "r2l/common/error.hpp"

namespace r2l::bench {

BenchResult bench_walltime(const std::string& label, const std::vector<scene::CameraPose>& poses, std::size_t threads,
                           const std::function<void(const scene::CameraPose&)>& render) {
  if (poses.empty()) throw UsageError("bench_walltime: need at least one pose");
  render(poses.front());
  BenchResult r;
  r.label = label;
  r.frames = poses.size();
  r.threads = threads;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& pose : poses) {
    render(pose);
    r.rays += pose.pixel_count();
  }
  r.seconds_total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.seconds_per_frame = r.seconds_total / static_cast<double>(r.frames);
  r.microseconds_per_ray = r.seconds_total * 1e6 / static_cast<double>(r.rays);
  return r;
}

BenchResult bench_student(const student::StudentModel& model, const std::vector<scene::CameraPose>& poses,
                          std::size_t threads) {
  return bench_walltime("student " + model.network.config().name, poses, threads, [&](const scene::CameraPose& p) {
    (void)student::render_image_student(model, p, threads);
  });
}

BenchResult bench_teacher(const teacher::NerfMlp<float>& model, int samples_per_ray,
                          const teacher::Background& background, const std::vector<scene::CameraPose>& poses,
                          std::size_t threads) {
  const auto& c = model.config();
  return bench_walltime("teacher W" + std::to_string(c.width) + " N=" + std::to_string(samples_per_ray), poses,
                        threads, [&](const scene::CameraPose& p) {
                          (void)teacher::render_image(model, p, samples_per_ray, background, threads);
                        });
}

nlohmann::json to_json(const BenchResult& r) {
  return {{"label", r.label},
          {"frames", r.frames},
          {"threads", r.threads},
          {"rays", r.rays},
          {"seconds_total", r.seconds_total},
          {"seconds_per_frame", r.seconds_per_frame},
          {"microseconds_per_ray", r.microseconds_per_ray},
          {"digest", r.digest}};
}

}  // namespace r2l::bench
