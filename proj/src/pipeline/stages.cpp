#include "r2l/pipeline/stages.hpp"

#include <fstream>

#include "r2l/bench/metrics.hpp"
#include "r2l/common/binary_io.hpp"
#include "r2l/common/error.hpp"
#include "r2l/distill/bbox.hpp"
#include "r2l/scene/reference.hpp"

namespace r2l::pipeline {

using nlohmann::json;

SceneData prepare_scene(const ExperimentConfig& config) {
  SceneData data;
  data.desc = config.scene;
  const auto& sc = config.scene.scene;
  for (const auto& pose : scene::train_poses(config.scene)) {
    data.train.push_back({pose, scene::reference_image(sc, pose, config.reference_quadrature, config.threads)});
  }
  for (const auto& pose : scene::test_poses(config.scene)) {
    data.test.push_back({pose, scene::reference_image(sc, pose, config.reference_quadrature, config.threads)});
  }
  return data;
}

std::vector<Ray> view_rays(const std::vector<teacher::View>& views) {
  std::vector<Ray> rays;
  for (const auto& v : views) {
    const auto r = scene::generate_rays(v.pose);
    rays.insert(rays.end(), r.begin(), r.end());
  }
  return rays;
}

Quality compare_images(const std::vector<Image>& predicted, const std::vector<Image>& truth) {
  if (predicted.size() != truth.size() || predicted.empty()) throw UsageError("image lists differ in length");
  Quality q;
  double mse_sum = 0.0;
  double weight = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double m = bench::mse(predicted[i], truth[i]);
    const auto n = static_cast<double>(truth[i].pixel_count());
    mse_sum += m * n;
    weight += n;
    q.view_psnr.push_back(bench::psnr_from_mse(m));
    q.ssim += bench::ssim(predicted[i], truth[i]);
  }
  q.psnr = bench::psnr_from_mse(mse_sum / weight);
  q.ssim /= static_cast<double>(predicted.size());
  return q;
}

std::vector<Image> images_of(const std::vector<teacher::View>& views) {
  std::vector<Image> out;
  for (const auto& v : views) out.push_back(v.image);
  return out;
}

std::vector<Image> render_teacher_views(const teacher::NerfMlp<float>& model, int samples_per_ray,
                                        const teacher::Background& background,
                                        const std::vector<teacher::View>& views, std::size_t threads) {
  std::vector<Image> out;
  for (const auto& v : views) out.push_back(teacher::render_image(model, v.pose, samples_per_ray, background, threads).image);
  return out;
}

std::vector<Image> render_student_views(const student::StudentModel& model, const std::vector<teacher::View>& views,
                                        std::size_t threads) {
  std::vector<Image> out;
  for (const auto& v : views) out.push_back(student::render_image_student(model, v.pose, threads).image);
  return out;
}

json to_json(const Quality& q) { return {{"psnr", q.psnr}, {"ssim", q.ssim}, {"view_psnr", q.view_psnr}}; }

namespace {

std::string file_digest(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return to_hex(sha256(bytes));
}

json teacher_curve(const teacher::TeacherRun& run) {
  json curve = json::array();
  for (const auto& e : run.log) {
    curve.push_back({{"iteration", e.iteration}, {"loss", e.loss}, {"train_psnr", e.train_psnr},
                     {"test_psnr", e.test_psnr}});
  }
  return curve;
}

}  // namespace

teacher::LoadedTeacher teacher_stage(const ExperimentConfig& config, const SceneData& scene, const RunPaths& paths,
                                     RunResults& results, RunLog& log) {
  auto tc = config.teacher;
  tc.checkpoint_path = paths.teacher();
  log.line("teacher: training W" + std::to_string(tc.network.width) + " N=" + std::to_string(tc.samples_per_ray) +
           " for " + std::to_string(tc.iterations) + " iterations");
  const auto run = teacher::train_teacher(scene.train, scene.test, tc, log.progress());
  teacher::save_teacher(run.model, tc, paths.teacher());
  auto loaded = teacher::load_teacher(paths.teacher());
  const auto rendered = render_teacher_views(loaded.model, tc.samples_per_ray, tc.background, scene.test, config.threads);
  const auto q = compare_images(rendered, images_of(scene.test));
  log.line("teacher: test PSNR " + std::to_string(q.psnr) + " dB, SSIM " + std::to_string(q.ssim));
  results.results["teacher"] = {{"digest", to_hex(loaded.digest)},
                                {"test", to_json(q)},
                                {"rejected_steps", run.rejected_steps},
                                {"final_loss", run.log.empty() ? json(nullptr) : json(run.log.back().loss)},
                                {"curve", teacher_curve(run)}};
  results.timing["teacher_train_seconds"] = run.seconds;
  return loaded;
}

distill::PseudoDataset distill_stage(const ExperimentConfig& config, const teacher::LoadedTeacher& teacher,
                                     const SceneData& scene, const RunPaths& paths, RunResults& results, RunLog& log) {
  const auto start = std::chrono::steady_clock::now();
  const auto box = distill::infer_bbox(view_rays(scene.train));
  distill::PseudoConfig pc;
  pc.rays = static_cast<std::size_t>(config.pseudo.images * static_cast<double>(config.scene.orbit.width) *
                                     static_cast<double>(config.scene.orbit.height));
  pc.include_real = config.pseudo.include_real;
  pc.seed = config.pseudo_seed();
  pc.near = config.scene.orbit.near;
  pc.far = config.scene.orbit.far;
  pc.samples_per_ray = config.pseudo.samples_per_ray;
  pc.threads = config.threads;
  pc.expected_teacher = teacher.digest;
  log.line("distill: labeling " + std::to_string(pc.rays) + " pseudo rays" +
           (pc.include_real ? " plus the training pixels" : ""));
  auto data = distill::generate_pseudo_dataset(teacher, box, pc.include_real ? scene.train : std::vector<teacher::View>{},
                                               pc);
  distill::save_dataset(data, paths.dataset());
  results.results["distill"] = {{"records", data.size()},
                                {"pseudo_records", data.pseudo_count},
                                {"teacher_digest", to_hex(data.teacher_digest)},
                                {"dataset_digest", file_digest(paths.dataset())}};
  results.timing["distill_seconds"] = seconds_since(start);
  return data;
}

student::StudentModel student_stage(const ExperimentConfig& config, const distill::PseudoDataset& dataset,
                                    const SceneData& scene, const RunPaths& paths, RunResults& results, RunLog& log) {
  auto model = student::make_student(config.student.network, config.student.encoder, config.student_init_seed());
  auto tc = config.student.train;
  tc.checkpoint_path = paths.student();
  log.line("student: training " + config.student.network.name + " on " + std::to_string(dataset.size()) +
           " records for " + std::to_string(tc.iterations) + " iterations");
  const auto run = distill::train_student(dataset, model, tc, scene.test, log.progress());
  student::save_student(model, paths.student(), {{"experiment", config.name}});
  const auto q = compare_images(render_student_views(model, scene.test, config.threads), images_of(scene.test));
  log.line("student: test PSNR " + std::to_string(q.psnr) + " dB, SSIM " + std::to_string(q.ssim));
  json curve = json::array();
  for (const auto& e : run.log) {
    curve.push_back({{"iteration", e.iteration}, {"batch_loss", e.batch_loss}, {"pool_size", e.pool_size},
                     {"train_loss", e.train_loss}, {"train_psnr", e.train_psnr}, {"test_psnr", e.test_psnr}});
  }
  results.results["student"] = {{"digest", file_digest(paths.student())},
                                {"test", to_json(q)},
                                {"rejected_steps", run.rejected_steps},
                                {"curve", curve}};
  results.timing["student_train_seconds"] = run.seconds;
  return model;
}

json evaluate_models(const ExperimentConfig& config, const SceneData& scene, const teacher::LoadedTeacher* teacher,
                     const student::StudentModel* student) {
  json out = json::object();
  const auto truth = images_of(scene.test);
  std::vector<Image> teacher_images;
  if (teacher != nullptr) {
    teacher_images = render_teacher_views(teacher->model, teacher->config.samples_per_ray, teacher->config.background,
                                          scene.test, config.threads);
    out["teacher_vs_truth"] = to_json(compare_images(teacher_images, truth));
  }
  if (student != nullptr) {
    const auto student_images = render_student_views(*student, scene.test, config.threads);
    out["student_vs_truth"] = to_json(compare_images(student_images, truth));
    if (teacher != nullptr) out["student_vs_teacher"] = to_json(compare_images(student_images, teacher_images));
  }
  out["metric_notes"] = {"PSNR over RGB jointly with peak 1", "SSIM on luma, 11x11 Gaussian window, sigma 1.5"};
  return out;
}

std::vector<scene::CameraPose> bench_poses(const ExperimentConfig& config) {
  return scene::sample_poses(config.scene.orbit, config.bench.frames, derive_seed(config.bench.pose_seed, 0xBE7C));
}

void bench_stage(const ExperimentConfig& config, const teacher::NerfMlp<float>& teacher,
                 const student::StudentModel& student, RunResults& results, RunLog& log) {
  auto sf = bench::count_flops(config.student.network, config.student.encoder);
  const auto tf = bench::count_flops(teacher.config(), static_cast<std::uint64_t>(config.bench.teacher_samples));
  sf.set_reference(tf);
  results.results["flops"] = {{"student", bench::to_json(sf)}, {"teacher", bench::to_json(tf)}};
  const auto poses = bench_poses(config);
  log.line("bench: timing " + std::to_string(poses.size()) + " frames per model");
  const auto s = bench::bench_student(student, poses, config.threads);
  const auto t = bench::bench_teacher(teacher, config.bench.teacher_samples, config.teacher.background, poses,
                                      config.threads);
  const double speedup = t.microseconds_per_ray / s.microseconds_per_ray;
  log.line("bench: student " + std::to_string(s.microseconds_per_ray) + " us/ray, teacher " +
           std::to_string(t.microseconds_per_ray) + " us/ray, speedup " + std::to_string(speedup));
  results.timing["bench"] = {{"student", bench::to_json(s)},
                             {"teacher", bench::to_json(t)},
                             {"speedup", speedup},
                             {"flops_ratio", sf.ratio}};
}

RunResults run_pipeline(const ExperimentConfig& input, const RunPaths& paths, std::ostream* echo) {
  auto config = input;
  propagate(config);
  std::filesystem::create_directories(paths.dir);
  {
    std::ofstream out(paths.config());
    out << to_json(config).dump(2) << '\n';
  }
  RunLog log(paths.log(), echo);
  RunResults results;
  results.results["config_digest"] = to_hex(config_digest(config));
  results.results["name"] = config.name;
  results.results["seed"] = config.seed;
  results.results["threads"] = config.threads;
  const auto start = std::chrono::steady_clock::now();
  log.line("scene: rendering reference views");
  const auto scene = prepare_scene(config);
  const auto teacher = teacher_stage(config, scene, paths, results, log);
  write_results(results, paths.results());
  const auto dataset = distill_stage(config, teacher, scene, paths, results, log);
  write_results(results, paths.results());
  const auto student = student_stage(config, dataset, scene, paths, results, log);
  results.results["eval"] = evaluate_models(config, scene, &teacher, &student);
  write_results(results, paths.results());
  if (config.bench.frames > 0) bench_stage(config, teacher.model, student, results, log);
  results.timing["total_seconds"] = seconds_since(start);
  write_results(results, paths.results());
  return results;
}

}  // namespace r2l::pipeline
