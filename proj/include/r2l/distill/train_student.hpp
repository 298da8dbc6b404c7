#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

#include "r2l/distill/hard_pool.hpp"
#include "r2l/distill/pseudo_dataset.hpp"
#include "r2l/student/student.hpp"
#include "r2l/teacher/teacher.hpp"

namespace r2l::distill {

struct StudentTrainConfig {
  int batch_rays = 8192;
  std::int64_t iterations = 50000;
  double base_lr = 5e-4;
  double pool_ratio = 0.2;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  int log_every = 100;
  int eval_every = 0;             // 0 disables periodic evaluation
  std::size_t train_probe = 2048;  // fixed training records scored in test mode at each evaluation
  std::filesystem::path checkpoint_path;
  int checkpoint_every = 0;
};

void validate(const StudentTrainConfig& config);

struct StudentLogEntry {
  std::int64_t iteration = 0;
  double batch_loss = 0.0;  // MSE of the composed batch (includes pool rays)
  double lr = 0.0;
  std::size_t pool_size = 0;
  double train_loss = std::numeric_limits<double>::quiet_NaN();  // probe MSE
  double train_psnr = std::numeric_limits<double>::quiet_NaN();
  double test_psnr = std::numeric_limits<double>::quiet_NaN();   // held-out views
};

struct StudentRun {
  std::vector<StudentLogEntry> log;
  std::int64_t rejected_steps = 0;
  double seconds = 0.0;
};

/// Adapts a dataset to the batch composer.
class DatasetSource final : public RecordSource {
 public:
  explicit DatasetSource(const PseudoDataset& dataset) : dataset_(dataset) {}
  std::size_t size() const override { return dataset_.size(); }
  Ray ray(std::size_t i) const override { return dataset_.ray(i); }
  std::array<float, 3> target(std::size_t i) const override { return dataset_.records[i].rgb; }

 private:
  const PseudoDataset& dataset_;
};

/// Distills the dataset into `model`. Each step composes a batch (fresh
/// records plus hard examples), encodes every ray with fresh train-mode
/// depths, updates the pool from per-ray losses and takes one Adam step.
/// Throws TrainingDiverged on a non-finite loss; checkpoints already written
/// are kept.
StudentRun train_student(const PseudoDataset& dataset, student::StudentModel& model, const StudentTrainConfig& config,
                         const std::vector<teacher::View>& held_out = {}, std::ostream* progress = nullptr);

/// PSNR of the model over all pixels of the views (joint RGB).
double views_psnr(const student::StudentModel& model, const std::vector<teacher::View>& views,
                  std::size_t threads = 1);

}  // namespace r2l::distill
