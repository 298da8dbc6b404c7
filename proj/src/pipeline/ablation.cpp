#include "r2l/pipeline/ablation.hpp"

#include <algorithm>
#include <cmath>

#include "r2l/common/error.hpp"
#include "r2l/distill/bbox.hpp"

namespace r2l::pipeline {

using nlohmann::json;

SweepKind parse_sweep(const std::string& name) {
  if (name == "k") return SweepKind::k;
  if (name == "r") return SweepKind::r;
  if (name == "pseudo") return SweepKind::pseudo;
  if (name == "residual") return SweepKind::residual;
  throw ConfigError("unknown sweep '" + name + "' (expected k, r, pseudo or residual)");
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::k: return "k";
    case SweepKind::r: return "r";
    case SweepKind::pseudo: return "pseudo";
    case SweepKind::residual: return "residual";
  }
  return "?";
}

std::vector<double> default_values(SweepKind kind) {
  switch (kind) {
    case SweepKind::k: return {2, 4, 8, 16, 32};
    case SweepKind::r: return {0.0, 0.1, 0.2, 0.3};
    case SweepKind::pseudo: return {0, 250, 500, 1000, 2000};
    case SweepKind::residual: return {1, 0};
  }
  return {};
}

TrialResult run_trial(const std::string& label, const distill::PseudoDataset& dataset, const StudentSpec& spec,
                      std::uint64_t seed, const std::vector<teacher::View>& held_out, std::size_t threads,
                      RunLog* log) {
  TrialResult t;
  t.label = label;
  t.seed = seed;
  auto model = student::make_student(spec.network, spec.encoder, derive_seed(seed, 3));
  auto cfg = spec.train;
  cfg.seed = derive_seed(seed, 4);
  cfg.threads = threads;
  if (cfg.eval_every == 0) cfg.eval_every = static_cast<int>(cfg.iterations);  // at least a final score
  if (log != nullptr) log->line("trial " + label + " seed " + std::to_string(seed) + ": " +
                                std::to_string(dataset.size()) + " records");
  t.run = distill::train_student(dataset, model, cfg, held_out, log != nullptr ? log->progress() : nullptr);
  t.test_psnr = held_out.empty() ? std::nan("") : distill::views_psnr(model, held_out, threads);
  const auto last = std::find_if(t.run.log.rbegin(), t.run.log.rend(),
                                 [](const auto& e) { return std::isfinite(e.train_loss); });
  t.train_loss = last == t.run.log.rend() ? std::nan("") : last->train_loss;
  t.train_psnr = last == t.run.log.rend() ? std::nan("") : last->train_psnr;
  if (log != nullptr) {
    log->line("trial " + label + " seed " + std::to_string(seed) + ": test PSNR " + std::to_string(t.test_psnr) +
              ", train PSNR " + std::to_string(t.train_psnr));
  }
  return t;
}

json to_json(const TrialResult& t) {
  json curve = json::array();
  for (const auto& e : t.run.log) {
    curve.push_back({{"iteration", e.iteration}, {"batch_loss", e.batch_loss}, {"train_loss", e.train_loss},
                     {"train_psnr", e.train_psnr}, {"test_psnr", e.test_psnr}});
  }
  return {{"label", t.label},           {"seed", t.seed},
          {"test_psnr", t.test_psnr},   {"train_psnr", t.train_psnr},
          {"train_loss", t.train_loss}, {"rejected_steps", t.run.rejected_steps},
          {"curve", curve}};
}

std::optional<std::int64_t> iterations_to_loss(const distill::StudentRun& run, double threshold) {
  for (const auto& e : run.log) {
    if (std::isfinite(e.train_loss) && e.train_loss <= threshold) return e.iteration;
  }
  return std::nullopt;
}

std::optional<double> train_loss_at(const distill::StudentRun& run, std::int64_t iteration) {
  std::optional<double> out;
  for (const auto& e : run.log) {
    if (e.iteration > iteration) break;
    if (std::isfinite(e.train_loss)) out = e.train_loss;
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw UsageError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

distill::PseudoDataset make_dataset(const ExperimentConfig& config, const SceneData& scene,
                                    const teacher::LoadedTeacher& teacher, double images, bool include_real) {
  distill::PseudoConfig pc;
  pc.rays = static_cast<std::size_t>(images * static_cast<double>(config.scene.orbit.width) *
                                     static_cast<double>(config.scene.orbit.height));
  pc.include_real = include_real;
  pc.seed = config.pseudo_seed();
  pc.near = config.scene.orbit.near;
  pc.far = config.scene.orbit.far;
  pc.samples_per_ray = config.pseudo.samples_per_ray;
  pc.threads = config.threads;
  const auto box = distill::infer_bbox(view_rays(scene.train));
  return distill::generate_pseudo_dataset(teacher, box, include_real ? scene.train : std::vector<teacher::View>{}, pc);
}

distill::PseudoDataset real_dataset(const SceneData& scene) {
  distill::PseudoDataset d;
  const auto rays = view_rays(scene.train);
  d.box = distill::infer_bbox(rays);
  d.near = scene.desc.orbit.near;
  d.far = scene.desc.orbit.far;
  std::size_t at = 0;
  for (const auto& v : scene.train) {
    for (int r = 0; r < v.pose.height; ++r) {
      for (int c = 0; c < v.pose.width; ++c, ++at) {
        const float* px = v.image.pixel(r, c);
        d.records.push_back(distill::make_sample(rays[at], {px[0], px[1], px[2]}));
      }
    }
  }
  return d;
}

json run_sweep(const ExperimentConfig& config, const SceneData& scene, const teacher::LoadedTeacher* teacher,
               const distill::PseudoDataset* dataset, const SweepOptions& options, RunLog& log) {
  const auto values = options.values.empty() ? default_values(options.kind) : options.values;
  if (options.seeds < 1) throw ConfigError("sweep needs at least one seed");
  if (options.kind == SweepKind::pseudo && teacher == nullptr) throw UsageError("pseudo sweep needs a teacher");
  if (options.kind != SweepKind::pseudo && dataset == nullptr) throw UsageError("sweep needs a dataset");

  json trials = json::array();
  json summary = json::array();
  for (double value : values) {
    StudentSpec spec = config.student;
    std::optional<distill::PseudoDataset> own;
    const distill::PseudoDataset* data = dataset;
    std::string label = to_string(options.kind) + "=";
    switch (options.kind) {
      case SweepKind::k: {
        auto* k = std::get_if<student::KPointEncoder>(&spec.encoder);
        if (k == nullptr) throw ConfigError("k sweep needs a K-point encoder");
        k->points = static_cast<int>(value);
        label += std::to_string(k->points);
        break;
      }
      case SweepKind::r:
        spec.train.pool_ratio = value;
        label += std::to_string(value).substr(0, 4);
        break;
      case SweepKind::pseudo:
        own = value > 0 ? make_dataset(config, scene, *teacher, value, config.pseudo.include_real)
                        : real_dataset(scene);
        data = &*own;
        label += std::to_string(static_cast<long long>(value));
        break;
      case SweepKind::residual:
        spec.network.residual = value != 0.0;
        label += spec.network.residual ? "on" : "off";
        break;
    }
    std::vector<double> test, train, loss;
    for (int s = 0; s < options.seeds; ++s) {
      const auto t = run_trial(label, *data, spec, derive_seed(config.seed, 100 + static_cast<std::uint64_t>(s)),
                               scene.test, config.threads, &log);
      test.push_back(t.test_psnr);
      train.push_back(t.train_psnr);
      loss.push_back(t.train_loss);
      auto j = to_json(t);
      j["value"] = value;
      trials.push_back(std::move(j));
    }
    summary.push_back({{"value", value},
                       {"label", label},
                       {"records", data->size()},
                       {"median_test_psnr", median(test)},
                       {"median_train_psnr", median(train)},
                       {"median_train_loss", median(loss)}});
  }
  return {{"sweep", to_string(options.kind)}, {"seeds", options.seeds}, {"summary", summary}, {"trials", trials}};
}

}  // namespace r2l::pipeline
