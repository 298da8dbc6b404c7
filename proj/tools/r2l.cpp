// Command-line entry point: scene, teacher, distill, student, eval, bench, ablate and run.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>

#include "r2l/bench/flops.hpp"
#include "r2l/bench/metrics.hpp"
#include "r2l/common/error.hpp"
#include "r2l/pipeline/ablation.hpp"
#include "r2l/pipeline/stages.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace r2l;
using namespace r2l::pipeline;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out = "r2l_out";
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required = false) {
  auto* c = cmd->add_option("--config", o.config, "Experiment config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--threads", o.threads, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

ExperimentConfig load_config(const CommonOptions& o) {
  ExperimentConfig c = o.config.empty() ? desk_defaults() : load_experiment(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  propagate(c);
  return c;
}

void write_json(const json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void save_images(const std::vector<Image>& images, const fs::path& dir, const std::string& prefix, bool png) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < images.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03zu", prefix.c_str(), i);
    write_ppm(images[i], dir / (std::string(name) + ".ppm"));
    if (png) write_png(images[i], dir / (std::string(name) + ".png"));
  }
}

RunResults start_results(const ExperimentConfig& c) {
  RunResults r;
  r.results["config_digest"] = to_hex(config_digest(c));
  r.results["name"] = c.name;
  r.results["seed"] = c.seed;
  r.results["threads"] = c.threads;
  return r;
}

/// `--config` for `bench flops` may name a network (W256D88, "teacher") or a JSON file.
json flops_report(const std::string& config, int teacher_samples, int points, const std::string& encoder,
                  int octaves) {
  const teacher::NerfConfig nerf;
  const auto teacher_report = bench::count_flops(nerf, static_cast<std::uint64_t>(teacher_samples));
  if (config == "teacher") return bench::to_json(teacher_report);
  student::StudentConfig net;
  student::RayEncoder enc;
  teacher::NerfConfig reference = nerf;
  if (std::regex_match(config, std::regex(R"(W\d+D\d+)"))) {
    net = student::build_config(config);
    const teacher::PositionalEncoding pe{octaves, true};
    if (encoder == "plucker") {
      enc = student::PluckerEncoder{pe};
    } else {
      enc = student::KPointEncoder{points, pe, teacher::SamplingMode::test};
    }
  } else {
    const auto c = load_experiment(config);
    net = c.student.network;
    enc = c.student.encoder;
    reference = c.teacher.network;
  }
  auto report = bench::count_flops(net, enc);
  report.set_reference(bench::count_flops(reference, static_cast<std::uint64_t>(teacher_samples)));
  return bench::to_json(report);
}

int run(int argc, char** argv) {
  CLI::App app{"Radiance-field to light-field distillation at desk scale"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // scene render
  CommonOptions scene_opts;
  bool scene_png = false;
  auto* scene_cmd = app.add_subcommand("scene", "Analytic scene utilities")->require_subcommand(1);
  auto* scene_render = scene_cmd->add_subcommand("render", "Write reference images of the train and test views");
  add_common(scene_render, scene_opts);
  scene_render->add_flag("--png", scene_png, "Also write PNG files");

  // teacher train / render
  auto* teacher_cmd = app.add_subcommand("teacher", "Ray-marching teacher")->require_subcommand(1);
  CommonOptions tt_opts;
  auto* teacher_train = teacher_cmd->add_subcommand("train", "Train the teacher on the reference views");
  add_common(teacher_train, tt_opts);
  CommonOptions tr_opts;
  std::string tr_checkpoint;
  int tr_samples = 0;
  bool tr_png = false;
  auto* teacher_render = teacher_cmd->add_subcommand("render", "Render the test views with a teacher checkpoint");
  add_common(teacher_render, tr_opts);
  teacher_render->add_option("--checkpoint", tr_checkpoint, "Teacher checkpoint")->required()->check(CLI::ExistingFile);
  teacher_render->add_option("--samples", tr_samples, "Samples per ray (default: the training value)");
  teacher_render->add_flag("--png", tr_png, "Also write PNG files");

  // distill gen
  auto* distill_cmd = app.add_subcommand("distill", "Pseudo-data synthesis")->require_subcommand(1);
  CommonOptions dg_opts;
  std::string dg_teacher;
  std::optional<double> dg_images;
  std::optional<bool> dg_real;
  auto* distill_gen = distill_cmd->add_subcommand("gen", "Label random rays in the training bounding box");
  add_common(distill_gen, dg_opts);
  distill_gen->add_option("--teacher", dg_teacher, "Teacher checkpoint")->required()->check(CLI::ExistingFile);
  distill_gen->add_option("--images", dg_images, "Pseudo images (rays = images x pixels)");
  distill_gen->add_option("--include-real", dg_real, "Append the training pixels (true/false)");

  // student train
  auto* student_cmd = app.add_subcommand("student", "Light-field student")->require_subcommand(1);
  CommonOptions st_opts;
  std::string st_dataset;
  auto* student_train = student_cmd->add_subcommand("train", "Distill a pseudo dataset into a student");
  add_common(student_train, st_opts);
  student_train->add_option("--dataset", st_dataset, "Pseudo dataset (.r2ld)")->required()->check(CLI::ExistingFile);

  // eval
  CommonOptions ev_opts;
  std::string ev_teacher, ev_student;
  std::vector<std::string> ev_images;
  auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM of checkpoints on the test views, or of image pairs");
  add_common(eval_cmd, ev_opts);
  eval_cmd->add_option("--teacher", ev_teacher, "Teacher checkpoint")->check(CLI::ExistingFile);
  eval_cmd->add_option("--student", ev_student, "Student checkpoint")->check(CLI::ExistingFile);
  eval_cmd->add_option("--images", ev_images, "PPM pairs: a1 b1 [a2 b2 ...]")->check(CLI::ExistingFile);

  // bench flops / time
  auto* bench_cmd = app.add_subcommand("bench", "FLOPs and wall-time")->require_subcommand(1);
  std::string bf_config = "W256D88";
  std::string bf_out;
  int bf_samples = 256;
  int bf_points = 16;
  int bf_octaves = 10;
  std::string bf_encoder = "kpoint";
  auto* bench_flops = bench_cmd->add_subcommand("flops", "Per-ray FLOPs report");
  bench_flops->add_option("--config", bf_config, "Network name (W256D88, teacher) or experiment JSON")
      ->capture_default_str();
  bench_flops->add_option("--teacher-samples", bf_samples, "Teacher queries per ray")->capture_default_str();
  bench_flops->add_option("--points", bf_points, "K for the K-point encoder")->capture_default_str();
  bench_flops->add_option("--octaves", bf_octaves, "Encoding octaves")->capture_default_str();
  bench_flops->add_option("--encoder", bf_encoder, "kpoint or plucker")
      ->check(CLI::IsMember({"kpoint", "plucker"}))
      ->capture_default_str();
  bench_flops->add_option("--out", bf_out, "Also write the report to this file");
  CommonOptions bt_opts;
  std::string bt_teacher, bt_student;
  std::optional<int> bt_frames;
  auto* bench_time = bench_cmd->add_subcommand("time", "Average per-frame and per-ray render time");
  add_common(bench_time, bt_opts);
  bench_time->add_option("--teacher", bt_teacher, "Teacher checkpoint")->required()->check(CLI::ExistingFile);
  bench_time->add_option("--student", bt_student, "Student checkpoint")->required()->check(CLI::ExistingFile);
  bench_time->add_option("--frames", bt_frames, "Frames per model (default: the config)");

  // ablate
  CommonOptions ab_opts;
  std::string ab_sweep, ab_teacher, ab_dataset;
  std::vector<double> ab_values;
  int ab_seeds = 1;
  auto* ablate_cmd = app.add_subcommand("ablate", "Student sweeps over K, r, pseudo-data size or residuals");
  add_common(ablate_cmd, ab_opts);
  ablate_cmd->add_option("--sweep", ab_sweep, "k, r, pseudo or residual")
      ->required()
      ->check(CLI::IsMember({"k", "r", "pseudo", "residual"}));
  ablate_cmd->add_option("--teacher", ab_teacher, "Teacher checkpoint (required for the pseudo sweep)")
      ->check(CLI::ExistingFile);
  ablate_cmd->add_option("--dataset", ab_dataset, "Pseudo dataset for the k, r and residual sweeps")
      ->check(CLI::ExistingFile);
  ablate_cmd->add_option("--values", ab_values, "Sweep values (default: the standard grid)");
  ablate_cmd->add_option("--seeds", ab_seeds, "Seeds per value")->check(CLI::PositiveNumber)->capture_default_str();

  // run
  CommonOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Scene, teacher, distillation, student, eval and bench in one go");
  add_common(run_cmd, run_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0 && e.get_name() != "CallForHelp" && e.get_name() != "CallForAllHelp") {
      std::cerr << app.help() << std::flush;
    }
    return code;
  }

  if (*scene_render) {
    const auto c = load_config(scene_opts);
    const auto scene = prepare_scene(c);
    const fs::path out = scene_opts.out;
    save_images(images_of(scene.train), out / "train", "train", scene_png);
    save_images(images_of(scene.test), out / "test", "test", scene_png);
    write_json(scene::to_json(c.scene), out / "scene.json");
    std::cout << "wrote " << scene.train.size() << " train and " << scene.test.size() << " test views to " << out
              << '\n';
    return 0;
  }
  if (*teacher_train) {
    const auto c = load_config(tt_opts);
    RunPaths paths{tt_opts.out};
    fs::create_directories(paths.dir);
    write_json(to_json(c), paths.config());
    RunLog log(paths.log(), &std::cout);
    auto results = start_results(c);
    const auto scene = prepare_scene(c);
    teacher_stage(c, scene, paths, results, log);
    write_results(results, paths.results());
    return 0;
  }
  if (*teacher_render) {
    const auto c = load_config(tr_opts);
    const auto t = teacher::load_teacher(tr_checkpoint);
    const int n = tr_samples > 0 ? tr_samples : t.config.samples_per_ray;
    const auto scene = prepare_scene(c);
    const auto images = render_teacher_views(t.model, n, t.config.background, scene.test, c.threads);
    save_images(images, tr_opts.out, "teacher", tr_png);
    const auto q = compare_images(images, images_of(scene.test));
    std::cout << json{{"teacher_vs_truth", to_json(q)}, {"samples_per_ray", n}}.dump(2) << '\n';
    return 0;
  }
  if (*distill_gen) {
    auto c = load_config(dg_opts);
    if (dg_images) c.pseudo.images = *dg_images;
    if (dg_real) c.pseudo.include_real = *dg_real;
    RunPaths paths{dg_opts.out};
    fs::create_directories(paths.dir);
    RunLog log(paths.log(), &std::cout);
    auto results = start_results(c);
    const auto t = teacher::load_teacher(dg_teacher);
    const auto scene = prepare_scene(c);
    distill_stage(c, t, scene, paths, results, log);
    write_results(results, paths.results());
    return 0;
  }
  if (*student_train) {
    const auto c = load_config(st_opts);
    RunPaths paths{st_opts.out};
    fs::create_directories(paths.dir);
    write_json(to_json(c), paths.config());
    RunLog log(paths.log(), &std::cout);
    auto results = start_results(c);
    const auto data = distill::load_dataset(st_dataset);
    const auto scene = prepare_scene(c);
    student_stage(c, data, scene, paths, results, log);
    write_results(results, paths.results());
    return 0;
  }
  if (*eval_cmd) {
    json report;
    if (!ev_images.empty()) {
      if (ev_images.size() % 2 != 0) throw UsageError("--images expects pairs of files");
      json pairs = json::array();
      for (std::size_t i = 0; i < ev_images.size(); i += 2) {
        const auto a = read_ppm(ev_images[i]);
        const auto b = read_ppm(ev_images[i + 1]);
        const double p = bench::psnr(a, b);
        pairs.push_back({{"a", ev_images[i]},
                         {"b", ev_images[i + 1]},
                         {"psnr", std::isinf(p) ? json("inf") : json(p)},
                         {"ssim", bench::ssim(a, b)}});
      }
      report["pairs"] = pairs;
    } else {
      if (ev_teacher.empty() && ev_student.empty()) throw UsageError("eval needs --teacher, --student or --images");
      const auto c = load_config(ev_opts);
      const auto scene = prepare_scene(c);
      std::optional<teacher::LoadedTeacher> t;
      std::optional<student::LoadedStudent> s;
      if (!ev_teacher.empty()) t = teacher::load_teacher(ev_teacher);
      if (!ev_student.empty()) s = student::load_student(ev_student);
      report = evaluate_models(c, scene, t ? &*t : nullptr, s ? &s->model : nullptr);
    }
    std::cout << report.dump(2) << '\n';
    if (ev_opts.out != "r2l_out" || !ev_images.empty()) write_json(report, fs::path(ev_opts.out) / "eval.json");
    return 0;
  }
  if (*bench_flops) {
    const auto report = flops_report(bf_config, bf_samples, bf_points, bf_encoder, bf_octaves);
    std::cout << report.dump(2) << '\n';
    if (!bf_out.empty()) write_json(report, bf_out);
    return 0;
  }
  if (*bench_time) {
    auto c = load_config(bt_opts);
    if (bt_frames) c.bench.frames = *bt_frames;
    const auto t = teacher::load_teacher(bt_teacher);
    const auto s = student::load_student(bt_student);
    c.student.network = s.model.network.config();
    c.student.encoder = s.model.encoder;
    c.teacher.background = t.config.background;
    RunLog log(fs::path(bt_opts.out) / "bench.log", &std::cout);
    RunResults results = start_results(c);
    bench_stage(c, t.model, s.model, results, log);
    results.timing["bench"]["teacher"]["digest"] = to_hex(t.digest);
    results.timing["bench"]["student"]["digest"] = to_hex(s.digest);
    write_results(results, fs::path(bt_opts.out) / "bench.json");
    return 0;
  }
  if (*ablate_cmd) {
    const auto c = load_config(ab_opts);
    const fs::path out = ab_opts.out;
    RunLog log(out / "ablate.log", &std::cout);
    const auto scene = prepare_scene(c);
    std::optional<teacher::LoadedTeacher> t;
    std::optional<distill::PseudoDataset> data;
    if (!ab_teacher.empty()) t = teacher::load_teacher(ab_teacher);
    if (!ab_dataset.empty()) data = distill::load_dataset(ab_dataset);
    SweepOptions opts{parse_sweep(ab_sweep), ab_values, ab_seeds};
    auto results = start_results(c);
    results.results["ablation"] = run_sweep(c, scene, t ? &*t : nullptr, data ? &*data : nullptr, opts, log);
    write_results(results, out / ("ablate_" + ab_sweep + ".json"));
    for (const auto& row : results.results["ablation"]["summary"]) {
      std::cout << row["label"].get<std::string>() << ": test PSNR " << row["median_test_psnr"] << ", train PSNR "
                << row["median_train_psnr"] << '\n';
    }
    return 0;
  }
  if (*run_cmd) {
    const auto c = load_config(run_opts);
    run_pipeline(c, RunPaths{run_opts.out}, &std::cout);
    return 0;
  }
  std::cerr << app.help();
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
  } catch (const DigestMismatch& e) {
    std::cerr << "digest mismatch: " << e.what() << '\n';
  } catch (const TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}
