#include "r2l/pipeline/config.hpp"

#include <fstream>

#include "r2l/common/error.hpp"
#include "r2l/common/rng.hpp"
#include "r2l/student/student.hpp"
#include "r2l/teacher/teacher_io.hpp"

namespace r2l::pipeline {

using nlohmann::json;

std::uint64_t ExperimentConfig::teacher_seed() const { return derive_seed(seed, 1); }
std::uint64_t ExperimentConfig::pseudo_seed() const { return derive_seed(seed, 2); }
std::uint64_t ExperimentConfig::student_init_seed() const { return derive_seed(seed, 3); }
std::uint64_t ExperimentConfig::student_train_seed() const { return derive_seed(seed, 4); }

ExperimentConfig desk_defaults() { return {}; }

json to_json(const student::RayEncoder& encoder) {
  if (const auto* k = std::get_if<student::KPointEncoder>(&encoder)) {
    return {{"kind", "kpoint"},
            {"points", k->points},
            {"octaves", k->encoding.octaves},
            {"include_input", k->encoding.include_raw}};
  }
  const auto& p = std::get<student::PluckerEncoder>(encoder);
  return {{"kind", "plucker"}, {"octaves", p.encoding.octaves}, {"include_input", p.encoding.include_raw}};
}

student::RayEncoder parse_encoder(const json& j) {
  try {
    const auto kind = j.value("kind", std::string("kpoint"));
    teacher::PositionalEncoding pe{j.value("octaves", 10), j.value("include_input", true)};
    student::RayEncoder out;
    if (kind == "kpoint") {
      out = student::KPointEncoder{j.value("points", 16), pe, teacher::SamplingMode::test};
    } else if (kind == "plucker") {
      out = student::PluckerEncoder{pe};
    } else {
      throw ConfigError("unknown encoder kind '" + kind + "'");
    }
    student::validate(out);
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("encoder config: ") + e.what());
  }
}

json to_json(const distill::StudentTrainConfig& c) {
  return {{"batch_rays", c.batch_rays}, {"iterations", c.iterations}, {"base_lr", c.base_lr},
          {"pool_ratio", c.pool_ratio}, {"log_every", c.log_every},   {"eval_every", c.eval_every},
          {"train_probe", c.train_probe}, {"checkpoint_every", c.checkpoint_every}};
}

distill::StudentTrainConfig parse_student_train_config(const json& j) {
  try {
    distill::StudentTrainConfig c;
    c.batch_rays = j.value("batch_rays", c.batch_rays);
    c.iterations = j.value("iterations", c.iterations);
    c.base_lr = j.value("base_lr", c.base_lr);
    c.pool_ratio = j.value("pool_ratio", c.pool_ratio);
    c.log_every = j.value("log_every", c.log_every);
    c.eval_every = j.value("eval_every", c.eval_every);
    c.train_probe = j.value("train_probe", c.train_probe);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("student training config: ") + e.what());
  }
}

json to_json(const ExperimentConfig& c) {
  json teacher = teacher::to_json(c.teacher);
  return {{"name", c.name},
          {"seed", c.seed},
          {"threads", c.threads},
          {"scene", scene::to_json(c.scene)},
          {"reference_quadrature", c.reference_quadrature},
          {"teacher", teacher},
          {"pseudo",
           {{"images", c.pseudo.images},
            {"include_real", c.pseudo.include_real},
            {"samples_per_ray", c.pseudo.samples_per_ray}}},
          {"student",
           {{"network", student::to_json(c.student.network)},
            {"encoder", to_json(c.student.encoder)},
            {"train", to_json(c.student.train)}}},
          {"bench",
           {{"frames", c.bench.frames}, {"teacher_samples", c.bench.teacher_samples}, {"pose_seed", c.bench.pose_seed}}}};
}

ExperimentConfig parse_experiment(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  try {
    ExperimentConfig c;
    c.name = j.value("name", c.name);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    if (j.contains("scene")) c.scene = scene::parse_scene_description(j.at("scene"));
    c.reference_quadrature = j.value("reference_quadrature", c.reference_quadrature);
    if (j.contains("teacher")) c.teacher = teacher::parse_teacher_config(j.at("teacher"));
    if (j.contains("pseudo")) {
      const auto& p = j.at("pseudo");
      c.pseudo.images = p.value("images", c.pseudo.images);
      c.pseudo.include_real = p.value("include_real", c.pseudo.include_real);
      c.pseudo.samples_per_ray = p.value("samples_per_ray", c.pseudo.samples_per_ray);
    }
    if (j.contains("student")) {
      const auto& s = j.at("student");
      if (s.contains("network")) c.student.network = student::parse_student_config(s.at("network"));
      if (s.contains("encoder")) c.student.encoder = parse_encoder(s.at("encoder"));
      if (s.contains("train")) c.student.train = parse_student_train_config(s.at("train"));
    }
    if (j.contains("bench")) {
      const auto& b = j.at("bench");
      c.bench.frames = b.value("frames", c.bench.frames);
      c.bench.teacher_samples = b.value("teacher_samples", c.bench.teacher_samples);
      c.bench.pose_seed = b.value("pose_seed", c.bench.pose_seed);
    }
    if (c.reference_quadrature < 2) throw ConfigError("reference_quadrature must be at least 2");
    if (c.pseudo.images < 0) throw ConfigError("pseudo.images must be non-negative");
    if (c.bench.frames < 1) throw ConfigError("bench.frames must be positive");
    student::validate(c.student.network);
    distill::validate(c.student.train);
    teacher::validate(c.teacher);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_experiment(j);
}

void propagate(ExperimentConfig& c) {
  c.teacher.seed = c.teacher_seed();
  c.teacher.threads = c.threads;
  const auto& bg = c.scene.scene.background();
  c.teacher.background = {static_cast<float>(bg[0]), static_cast<float>(bg[1]), static_cast<float>(bg[2])};
  c.student.train.seed = c.student_train_seed();
  c.student.train.threads = c.threads;
}

Sha256 config_digest(const ExperimentConfig& config) {
  const auto text = to_json(config).dump();
  return sha256(std::as_bytes(std::span(text.data(), text.size())));
}

}  // namespace r2l::pipeline
