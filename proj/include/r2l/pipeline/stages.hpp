#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "r2l/bench/flops.hpp"
#include "r2l/bench/walltime.hpp"
#include "r2l/distill/pseudo_dataset.hpp"
#include "r2l/pipeline/config.hpp"
#include "r2l/pipeline/results.hpp"
#include "r2l/student/student.hpp"
#include "r2l/teacher/teacher_io.hpp"

namespace r2l::pipeline {

/// Train and test views with reference-renderer ground truth.
struct SceneData {
  scene::SceneDescription desc;
  std::vector<teacher::View> train;
  std::vector<teacher::View> test;
};

SceneData prepare_scene(const ExperimentConfig& config);

/// Every ray of the given views.
std::vector<Ray> view_rays(const std::vector<teacher::View>& views);

struct Quality {
  double psnr = 0.0;  // joint over all pixels of all views
  double ssim = 0.0;  // mean over views
  std::vector<double> view_psnr;
};

/// Throws UsageError on count or shape mismatch.
Quality compare_images(const std::vector<Image>& predicted, const std::vector<Image>& truth);
std::vector<Image> images_of(const std::vector<teacher::View>& views);
std::vector<Image> render_teacher_views(const teacher::NerfMlp<float>& model, int samples_per_ray,
                                        const teacher::Background& background,
                                        const std::vector<teacher::View>& views, std::size_t threads);
std::vector<Image> render_student_views(const student::StudentModel& model, const std::vector<teacher::View>& views,
                                        std::size_t threads);
nlohmann::json to_json(const Quality& quality);

/// Output file names inside a run directory.
struct RunPaths {
  std::filesystem::path dir;
  std::filesystem::path teacher() const { return dir / "teacher.r2lc"; }
  std::filesystem::path dataset() const { return dir / "pseudo.r2ld"; }
  std::filesystem::path student() const { return dir / "student.r2lc"; }
  std::filesystem::path results() const { return dir / "results.json"; }
  std::filesystem::path log() const { return dir / "run.log"; }
  std::filesystem::path config() const { return dir / "config.json"; }
};

/// Trains the teacher, writes its checkpoint and scores it against the test views.
teacher::LoadedTeacher teacher_stage(const ExperimentConfig& config, const SceneData& scene, const RunPaths& paths,
                                     RunResults& results, RunLog& log);

/// Synthesizes the pseudo dataset from the teacher and writes it.
distill::PseudoDataset distill_stage(const ExperimentConfig& config, const teacher::LoadedTeacher& teacher,
                                     const SceneData& scene, const RunPaths& paths, RunResults& results, RunLog& log);

/// Distills the dataset into a fresh student and writes its checkpoint.
student::StudentModel student_stage(const ExperimentConfig& config, const distill::PseudoDataset& dataset,
                                    const SceneData& scene, const RunPaths& paths, RunResults& results, RunLog& log);

/// Teacher and student vs ground truth on the test views, and student vs teacher.
nlohmann::json evaluate_models(const ExperimentConfig& config, const SceneData& scene,
                               const teacher::LoadedTeacher* teacher, const student::StudentModel* student);

/// FLOPs for the configured pair plus timing over `bench.frames` sampled poses.
void bench_stage(const ExperimentConfig& config, const teacher::NerfMlp<float>& teacher,
                 const student::StudentModel& student, RunResults& results, RunLog& log);

/// Runs every stage in order into `paths.dir` and writes results.json.
RunResults run_pipeline(const ExperimentConfig& config, const RunPaths& paths, std::ostream* echo);

/// Poses for wall-time measurement; disjoint from the train and test seeds.
std::vector<scene::CameraPose> bench_poses(const ExperimentConfig& config);

}  // namespace r2l::pipeline
