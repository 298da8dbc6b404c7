#pragma once

#include <optional>
#include <string>
#include <vector>

#include "r2l/pipeline/stages.hpp"

namespace r2l::pipeline {

enum class SweepKind { k, r, pseudo, residual };

/// "k", "r", "pseudo" or "residual"; throws ConfigError otherwise.
SweepKind parse_sweep(const std::string& name);
std::string to_string(SweepKind kind);
/// K ∈ {2,4,8,16,32}; r ∈ {0,0.1,0.2,0.3}; pseudo images {0,250,500,1000,2000}
/// (0 trains on the real pixels only); residual {1, 0}.
std::vector<double> default_values(SweepKind kind);

struct TrialResult {
  std::string label;
  std::uint64_t seed = 0;
  distill::StudentRun run;
  double test_psnr = 0.0;   // all pixels of the held-out views
  double train_psnr = 0.0;  // probe of training records, test-mode encoding
  double train_loss = 0.0;
};

/// One student distillation from a fresh model; seed drives init and batches.
TrialResult run_trial(const std::string& label, const distill::PseudoDataset& dataset, const StudentSpec& spec,
                      std::uint64_t seed, const std::vector<teacher::View>& held_out, std::size_t threads,
                      RunLog* log = nullptr);

nlohmann::json to_json(const TrialResult& trial);

/// First logged iteration whose probe train loss is ≤ threshold, if any.
std::optional<std::int64_t> iterations_to_loss(const distill::StudentRun& run, double threshold);
/// Probe train loss at the last evaluation at or before `iteration`.
std::optional<double> train_loss_at(const distill::StudentRun& run, std::int64_t iteration);

double median(std::vector<double> values);

struct SweepOptions {
  SweepKind kind = SweepKind::k;
  std::vector<double> values;  // empty: default_values(kind)
  int seeds = 1;
};

/// Student trials for every value and seed. `dataset` is used for the k, r and
/// residual sweeps; the pseudo sweep labels its own datasets with `teacher`.
nlohmann::json run_sweep(const ExperimentConfig& config, const SceneData& scene, const teacher::LoadedTeacher* teacher,
                         const distill::PseudoDataset* dataset, const SweepOptions& options, RunLog& log);

/// Pseudo dataset of `images` × pixels teacher rays, optionally with the real pixels.
distill::PseudoDataset make_dataset(const ExperimentConfig& config, const SceneData& scene,
                                    const teacher::LoadedTeacher& teacher, double images, bool include_real);

/// Real training pixels only (no teacher involved).
distill::PseudoDataset real_dataset(const SceneData& scene);

}  // namespace r2l::pipeline
