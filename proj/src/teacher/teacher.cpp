#include "r2l/teacher/teacher.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "r2l/bench/metrics.hpp"
#include "r2l/common/error.hpp"
#include "r2l/common/parallel.hpp"
#include "r2l/teacher/teacher_io.hpp"
#include "r2l/tensor/adam.hpp"
#include "r2l/tensor/loss.hpp"

namespace r2l::teacher {

using tensor::Matrix;

void validate(const TeacherConfig& c) {
  validate(c.network);
  if (c.samples_per_ray < 1) throw ConfigError("teacher: samples_per_ray must be ≥ 1");
  if (c.batch_rays < 1) throw ConfigError("teacher: batch_rays must be ≥ 1");
  if (c.iterations < 0) throw ConfigError("teacher: iterations must be ≥ 0");
  if (!(c.base_lr > 0.0)) throw ConfigError("teacher: learning rate must be positive");
}

template <typename T>
void build_sample_batch(const NerfConfig& config, std::span<const Ray> rays, int samples_per_ray, SamplingMode mode,
                        Rng* rng, SampleBatch<T>& out) {
  const auto n = static_cast<std::size_t>(samples_per_ray);
  const std::size_t rows = rays.size() * n;
  const std::size_t pos_dim = config.position_dim();
  const std::size_t dir_dim = config.direction_dim();
  out.positions.resize(static_cast<tensor::Index>(rows), static_cast<tensor::Index>(pos_dim));
  out.directions.resize(static_cast<tensor::Index>(rows), static_cast<tensor::Index>(dir_dim));
  out.delta.resize(rows);
  std::vector<double> depths(n), delta(n);
  std::vector<T> dir_code(dir_dim);
  for (std::size_t r = 0; r < rays.size(); ++r) {
    const Ray& ray = rays[r];
    stratified_depths(ray.near, ray.far, mode, rng, depths);
    interval_lengths(depths, ray.far, delta);
    const double d[3] = {ray.direction.x(), ray.direction.y(), ray.direction.z()};
    encode<T>(config.direction, d, dir_code);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = r * n + i;
      const Vec3 p = ray.at(depths[i]);
      const double pt[3] = {p.x(), p.y(), p.z()};
      encode<T>(config.position, pt, std::span<T>(out.positions.row(static_cast<tensor::Index>(row)).data(), pos_dim));
      std::copy(dir_code.begin(), dir_code.end(), out.directions.row(static_cast<tensor::Index>(row)).data());
      out.delta[row] = static_cast<T>(delta[i]);
    }
  }
}

template <typename T>
Matrix<T> composite_batch(const NerfOutput<T>& out, const std::vector<T>& delta, int samples_per_ray,
                          const std::array<T, 3>& background) {
  const auto n = static_cast<std::size_t>(samples_per_ray);
  const std::size_t rays = delta.size() / n;
  Matrix<T> rgb(static_cast<tensor::Index>(rays), 3);
  for (std::size_t r = 0; r < rays; ++r) {
    const std::size_t base = r * n;
    const auto c = composite_rgb<T>(std::span<const T>(out.sigma.data() + base, n),
                                    std::span<const T>(delta.data() + base, n),
                                    std::span<const T>(out.rgb.data() + 3 * base, 3 * n), background);
    rgb(static_cast<tensor::Index>(r), 0) = c[0];
    rgb(static_cast<tensor::Index>(r), 1) = c[1];
    rgb(static_cast<tensor::Index>(r), 2) = c[2];
  }
  return rgb;
}

template void build_sample_batch<float>(const NerfConfig&, std::span<const Ray>, int, SamplingMode, Rng*,
                                        SampleBatch<float>&);
template void build_sample_batch<double>(const NerfConfig&, std::span<const Ray>, int, SamplingMode, Rng*,
                                         SampleBatch<double>&);
template Matrix<float> composite_batch<float>(const NerfOutput<float>&, const std::vector<float>&, int,
                                              const std::array<float, 3>&);
template Matrix<double> composite_batch<double>(const NerfOutput<double>&, const std::vector<double>&, int,
                                                const std::array<double, 3>&);

Matrix<float> render_rays(const NerfMlp<float>& model, std::span<const Ray> rays, int samples_per_ray,
                          const Background& background, std::size_t threads) {
  Matrix<float> out(static_cast<tensor::Index>(rays.size()), 3);
  const std::size_t chunks = (rays.size() + kRenderChunkRays - 1) / kRenderChunkRays;
  parallel_shards(chunks, threads, [&](const ShardRange& shard) {
    SampleBatch<float> batch;
    std::vector<Ray> padded(kRenderChunkRays);
    for (std::size_t chunk = shard.begin; chunk < shard.end; ++chunk) {
      const std::size_t begin = chunk * kRenderChunkRays;
      const std::size_t count = std::min(kRenderChunkRays, rays.size() - begin);
      std::copy_n(rays.begin() + static_cast<std::ptrdiff_t>(begin), count, padded.begin());
      std::fill(padded.begin() + static_cast<std::ptrdiff_t>(count), padded.end(), rays[begin]);
      build_sample_batch<float>(model.config(), padded, samples_per_ray, SamplingMode::test, nullptr, batch);
      const auto net = model.forward(batch.positions, batch.directions);
      const auto rgb = composite_batch<float>(net, batch.delta, samples_per_ray, background);
      out.middleRows(static_cast<tensor::Index>(begin), static_cast<tensor::Index>(count)) =
          rgb.topRows(static_cast<tensor::Index>(count));
    }
  });
  return out;
}

TeacherImage render_image(const NerfMlp<float>& model, const scene::CameraPose& pose, int samples_per_ray,
                          const Background& background, std::size_t threads) {
  scene::validate(pose);
  const auto rays = scene::generate_rays(pose);
  const auto rgb = render_rays(model, rays, samples_per_ray, background, threads);
  TeacherImage out{Image(pose.width, pose.height), 0};
  std::copy(rgb.data(), rgb.data() + rgb.size(), out.image.data().begin());
  out.queries = static_cast<std::uint64_t>(rays.size()) * static_cast<std::uint64_t>(samples_per_ray);
  return out;
}

namespace {

struct PixelSet {
  std::vector<Ray> rays;
  Matrix<float> rgb;  // R × 3
};

PixelSet flatten_views(const std::vector<View>& views) {
  PixelSet set;
  std::size_t total = 0;
  for (const auto& v : views) total += v.pose.pixel_count();
  set.rays.reserve(total);
  set.rgb.resize(static_cast<tensor::Index>(total), 3);
  std::size_t at = 0;
  for (const auto& v : views) {
    if (v.image.width() != v.pose.width || v.image.height() != v.pose.height) {
      throw UsageError("training view image does not match its camera");
    }
    for (int r = 0; r < v.pose.height; ++r) {
      for (int c = 0; c < v.pose.width; ++c, ++at) {
        set.rays.push_back(scene::generate_ray(v.pose, r, c));
        const float* px = v.image.pixel(r, c);
        set.rgb.row(static_cast<tensor::Index>(at)) << px[0], px[1], px[2];
      }
    }
  }
  return set;
}

PixelSet subset(const PixelSet& all, std::size_t count, Rng& rng) {
  PixelSet s;
  count = std::min(count, all.rays.size());
  s.rgb.resize(static_cast<tensor::Index>(count), 3);
  for (std::size_t i = 0; i < count; ++i) {
    const auto k = rng.below(all.rays.size());
    s.rays.push_back(all.rays[k]);
    s.rgb.row(static_cast<tensor::Index>(i)) = all.rgb.row(static_cast<tensor::Index>(k));
  }
  return s;
}

double subset_psnr(const NerfMlp<float>& model, const PixelSet& set, const TeacherConfig& cfg) {
  if (set.rays.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto pred = render_rays(model, set.rays, cfg.samples_per_ray, cfg.background, cfg.threads);
  return bench::psnr_from_mse(static_cast<double>((pred - set.rgb).array().square().mean()));
}

}  // namespace

TeacherRun train_teacher(const std::vector<View>& train, const std::vector<View>& test, const TeacherConfig& cfg,
                         std::ostream* progress) {
  validate(cfg);
  if (train.empty()) throw UsageError("train_teacher: need at least one training image");
  const auto start = std::chrono::steady_clock::now();
  const PixelSet pixels = flatten_views(train);
  Rng eval_rng(derive_seed(cfg.seed, 0xE7A1));
  const PixelSet train_eval = cfg.eval_every > 0 ? subset(pixels, cfg.eval_rays, eval_rng) : PixelSet{};
  const PixelSet test_eval =
      cfg.eval_every > 0 && !test.empty() ? subset(flatten_views(test), cfg.eval_rays, eval_rng) : PixelSet{};

  TeacherRun run{NerfMlp<float>(cfg.network, cfg.seed), {}, 0, 0.0};
  auto& model = run.model;
  tensor::AdamState<float> adam(model.layers(), {.base_lr = cfg.base_lr});

  const std::size_t threads = std::max<std::size_t>(1, cfg.threads);
  const auto shards = split_shards(static_cast<std::size_t>(cfg.batch_rays), threads);
  std::vector<tensor::GradientTape<float>> tapes;
  for (std::size_t s = 0; s < shards.size(); ++s) tapes.emplace_back(model.layers());
  std::vector<SampleBatch<float>> batches(shards.size());
  std::vector<NerfOutput<float>> outputs(shards.size());

  Rng batch_rng(derive_seed(cfg.seed, 0xBA7C));
  std::vector<Ray> batch_rays(static_cast<std::size_t>(cfg.batch_rays));
  Matrix<float> target(cfg.batch_rays, 3);
  Matrix<float> pred(cfg.batch_rays, 3);
  const std::array<float, 3> bg = cfg.background;

  for (std::int64_t it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < cfg.batch_rays; ++i) {
      const auto k = batch_rng.below(pixels.rays.size());
      batch_rays[static_cast<std::size_t>(i)] = pixels.rays[k];
      target.row(i) = pixels.rgb.row(static_cast<tensor::Index>(k));
    }
    // forward per shard
    parallel_shards(shards.size(), threads, [&](const ShardRange& range) {
      for (std::size_t s = range.begin; s < range.end; ++s) {
        const auto& sh = shards[s];
        Rng rng(derive_seed(cfg.seed, (static_cast<std::uint64_t>(it) << 8) ^ s));
        std::span<const Ray> rays(batch_rays.data() + sh.begin, sh.end - sh.begin);
        build_sample_batch<float>(model.config(), rays, cfg.samples_per_ray, SamplingMode::train, &rng, batches[s]);
        tapes[s].zero_grad();
        outputs[s] = model.forward(batches[s].positions, batches[s].directions, tapes[s]);
        pred.middleRows(static_cast<tensor::Index>(sh.begin), static_cast<tensor::Index>(sh.end - sh.begin)) =
            composite_batch<float>(outputs[s], batches[s].delta, cfg.samples_per_ray, bg);
      }
    });
    const auto loss = tensor::mse_loss<float>(pred, target);
    if (!std::isfinite(loss.loss)) {
      throw TrainingDiverged("teacher loss became non-finite at iteration " + std::to_string(it));
    }
    const Matrix<float> grad = tensor::mse_loss_grad<float>(pred, target);
    // backward per shard
    parallel_shards(shards.size(), threads, [&](const ShardRange& range) {
      for (std::size_t s = range.begin; s < range.end; ++s) {
        const auto& sh = shards[s];
        const std::size_t n = static_cast<std::size_t>(cfg.samples_per_ray);
        const std::size_t rows = (sh.end - sh.begin) * n;
        Matrix<float> g_sigma(static_cast<tensor::Index>(rows), 1);
        Matrix<float> g_rgb(static_cast<tensor::Index>(rows), 3);
        for (std::size_t r = 0; r < sh.end - sh.begin; ++r) {
          const auto gr = grad.row(static_cast<tensor::Index>(sh.begin + r));
          const std::array<float, 3> g{gr(0), gr(1), gr(2)};
          composite_backward<float>(std::span<const float>(outputs[s].sigma.data() + r * n, n),
                                    std::span<const float>(batches[s].delta.data() + r * n, n),
                                    std::span<const float>(outputs[s].rgb.data() + 3 * r * n, 3 * n), bg, g,
                                    std::span<float>(g_sigma.data() + r * n, n),
                                    std::span<float>(g_rgb.data() + 3 * r * n, 3 * n));
        }
        model.backward(tapes[s], g_sigma, g_rgb);
      }
    });
    for (std::size_t s = 1; s < tapes.size(); ++s) {
      tensor::accumulate<float>(tapes[0].grads(), std::as_const(tapes[s]).grads());
    }
    const double lr = tensor::lr_schedule(it, cfg.iterations, cfg.base_lr);
    if (tensor::adam_step<float>(model.layers(), std::as_const(tapes[0]).grads(), adam, lr) !=
        tensor::StepStatus::applied) {
      ++run.rejected_steps;
    }

    const std::int64_t done = it + 1;
    const bool log_now = cfg.log_every > 0 && (done % cfg.log_every == 0 || done == cfg.iterations);
    const bool eval_now = cfg.eval_every > 0 && (done % cfg.eval_every == 0 || done == cfg.iterations);
    if (log_now || eval_now) {
      TeacherLogEntry e{done, static_cast<double>(loss.loss), lr};
      if (eval_now) {
        e.train_psnr = subset_psnr(model, train_eval, cfg);
        e.test_psnr = subset_psnr(model, test_eval, cfg);
      }
      run.log.push_back(e);
      if (progress) {
        *progress << "teacher it=" << done << " loss=" << e.loss << " lr=" << lr;
        if (eval_now) *progress << " train_psnr=" << e.train_psnr << " test_psnr=" << e.test_psnr;
        *progress << std::endl;
      }
    }
    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0) {
      save_teacher(model, cfg, cfg.checkpoint_path);
    }
  }
  if (!cfg.checkpoint_path.empty()) save_teacher(model, cfg, cfg.checkpoint_path);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace r2l::teacher
