#include "r2l/distill/train_student.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "r2l/bench/metrics.hpp"
#include "r2l/common/error.hpp"
#include "r2l/common/parallel.hpp"
#include "r2l/tensor/adam.hpp"
#include "r2l/tensor/loss.hpp"

namespace r2l::distill {

using tensor::Matrix;

void validate(const StudentTrainConfig& c) {
  if (c.batch_rays < 1) throw ConfigError("student: batch_rays must be ≥ 1");
  if (c.iterations < 0) throw ConfigError("student: iterations must be ≥ 0");
  if (!(c.base_lr > 0.0)) throw ConfigError("student: learning rate must be positive");
  if (!(c.pool_ratio >= 0.0 && c.pool_ratio < 1.0)) throw ConfigError("hard-example ratio must lie in [0, 1)");
}

double views_psnr(const student::StudentModel& model, const std::vector<teacher::View>& views, std::size_t threads) {
  if (views.empty()) return std::numeric_limits<double>::quiet_NaN();
  double se = 0.0;
  std::size_t n = 0;
  for (const auto& v : views) {
    const auto img = student::render_image_student(model, v.pose, threads).image;
    se += bench::mse(img, v.image) * static_cast<double>(img.data().size());
    n += img.data().size();
  }
  return bench::psnr_from_mse(se / static_cast<double>(n));
}

StudentRun train_student(const PseudoDataset& dataset, student::StudentModel& model, const StudentTrainConfig& cfg,
                         const std::vector<teacher::View>& held_out, std::ostream* progress) {
  validate(cfg);
  if (dataset.size() == 0) throw UsageError("train_student: dataset is empty");
  const auto start = std::chrono::steady_clock::now();
  StudentRun run;
  auto& net = model.network;
  const student::RayEncoder train_encoder = student::with_mode(model.encoder, teacher::SamplingMode::train);
  const auto dim = student::encoded_dim(train_encoder);

  const DatasetSource source(dataset);
  EpochStream stream(dataset.size(), derive_seed(cfg.seed, 0x57E4));
  const auto batch = static_cast<std::size_t>(cfg.batch_rays);
  HardExamplePool pool = HardExamplePool::for_batch(cfg.pool_ratio, batch);
  Rng pool_rng(derive_seed(cfg.seed, 0x9001));

  // Fixed probe of training records for the train loss/PSNR curve.
  std::vector<Ray> probe_rays;
  Matrix<float> probe_rgb;
  if (cfg.eval_every > 0 && cfg.train_probe > 0) {
    Rng probe_rng(derive_seed(cfg.seed, 0x960BE));
    const std::size_t n = std::min(cfg.train_probe, dataset.size());
    probe_rgb.resize(static_cast<tensor::Index>(n), 3);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = probe_rng.below(dataset.size());
      probe_rays.push_back(dataset.ray(k));
      const auto& t = dataset.records[k].rgb;
      probe_rgb.row(static_cast<tensor::Index>(i)) << t[0], t[1], t[2];
    }
  }

  tensor::AdamState<float> adam(net.layers(), {.base_lr = cfg.base_lr});
  const std::size_t threads = std::max<std::size_t>(1, cfg.threads);
  const auto shards = split_shards(batch, threads);
  std::vector<tensor::GradientTape<float>> tapes;
  for (std::size_t s = 0; s < shards.size(); ++s) tapes.emplace_back(net.layers());
  Matrix<float> pred(cfg.batch_rays, 3);

  for (std::int64_t it = 0; it < cfg.iterations; ++it) {
    const TrainingBatch b = compose_batch(source, stream, pool, batch, cfg.pool_ratio, pool_rng);
    parallel_shards(shards.size(), threads, [&](const ShardRange& range) {
      for (std::size_t s = range.begin; s < range.end; ++s) {
        const auto& sh = shards[s];
        Rng rng(derive_seed(cfg.seed, (static_cast<std::uint64_t>(it) << 8) ^ s));
        Matrix<float> encoded(static_cast<tensor::Index>(sh.end - sh.begin), static_cast<tensor::Index>(dim));
        for (std::size_t r = sh.begin; r < sh.end; ++r) {
          student::encode_ray<float>(train_encoder, b.rays[r], &rng,
                                     std::span<float>(encoded.row(static_cast<tensor::Index>(r - sh.begin)).data(), dim));
        }
        tapes[s].zero_grad();
        pred.middleRows(static_cast<tensor::Index>(sh.begin), static_cast<tensor::Index>(sh.end - sh.begin)) =
            net.forward(encoded, tapes[s]);
      }
    });
    const auto loss = tensor::mse_loss<float>(pred, b.targets);
    if (!std::isfinite(loss.loss)) {
      throw TrainingDiverged("student loss became non-finite at iteration " + std::to_string(it));
    }
    std::vector<double> per_ray(loss.per_ray.begin(), loss.per_ray.end());
    pool.update(b.rays, b.targets, per_ray, pool_rng);

    const Matrix<float> grad = tensor::mse_loss_grad<float>(pred, b.targets);
    parallel_shards(shards.size(), threads, [&](const ShardRange& range) {
      for (std::size_t s = range.begin; s < range.end; ++s) {
        const auto& sh = shards[s];
        const Matrix<float> g =
            grad.middleRows(static_cast<tensor::Index>(sh.begin), static_cast<tensor::Index>(sh.end - sh.begin));
        net.backward(tapes[s], g);
      }
    });
    for (std::size_t s = 1; s < tapes.size(); ++s) {
      tensor::accumulate<float>(tapes[0].grads(), std::as_const(tapes[s]).grads());
    }
    const double lr = tensor::lr_schedule(it, cfg.iterations, cfg.base_lr);
    if (tensor::adam_step<float>(net.layers(), std::as_const(tapes[0]).grads(), adam, lr) !=
        tensor::StepStatus::applied) {
      ++run.rejected_steps;
    }

    const std::int64_t done = it + 1;
    const bool log_now = cfg.log_every > 0 && (done % cfg.log_every == 0 || done == cfg.iterations);
    const bool eval_now = cfg.eval_every > 0 && (done % cfg.eval_every == 0 || done == cfg.iterations);
    if (log_now || eval_now) {
      StudentLogEntry e{done, static_cast<double>(loss.loss), lr, pool.size()};
      if (eval_now) {
        if (!probe_rays.empty()) {
          const Matrix<float> p = student::predict_rays(model, probe_rays, threads);
          e.train_loss = static_cast<double>((p - probe_rgb).array().square().mean());
          e.train_psnr = bench::psnr_from_mse(e.train_loss);
        }
        e.test_psnr = views_psnr(model, held_out, threads);
      }
      run.log.push_back(e);
      if (progress) {
        *progress << "student it=" << done << " loss=" << e.batch_loss << " lr=" << lr << " pool=" << e.pool_size;
        if (eval_now) {
          *progress << " train_loss=" << e.train_loss << " train_psnr=" << e.train_psnr
                    << " test_psnr=" << e.test_psnr;
        }
        *progress << std::endl;
      }
    }
    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0) {
      student::save_student(model, cfg.checkpoint_path);
    }
  }
  if (!cfg.checkpoint_path.empty()) student::save_student(model, cfg.checkpoint_path);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace r2l::distill
