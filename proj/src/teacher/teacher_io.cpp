#include "r2l/teacher/teacher_io.hpp"

#include "r2l/common/checkpoint.hpp"
#include "r2l/common/error.hpp"

namespace r2l::teacher {

using nlohmann::json;

namespace {

json to_json(const PositionalEncoding& pe) { return {{"octaves", pe.octaves}, {"include_raw", pe.include_raw}}; }

PositionalEncoding parse_encoding(const json& j, PositionalEncoding pe) {
  pe.octaves = j.value("octaves", pe.octaves);
  pe.include_raw = j.value("include_raw", pe.include_raw);
  if (pe.octaves < 0) throw ConfigError("encoding octaves must be ≥ 0");
  return pe;
}

}  // namespace

json to_json(const NerfConfig& c) {
  return {{"width", c.width},
          {"depth", c.depth},
          {"skip_layer", c.skip_layer},
          {"view_width", c.view_width},
          {"position", to_json(c.position)},
          {"direction", to_json(c.direction)},
          {"density_bias_init", c.density_bias_init}};
}

json to_json(const TeacherConfig& c) {
  return {{"network", to_json(c.network)},
          {"samples_per_ray", c.samples_per_ray},
          {"batch_rays", c.batch_rays},
          {"iterations", c.iterations},
          {"base_lr", c.base_lr},
          {"background", c.background},
          {"seed", c.seed},
          {"log_every", c.log_every},
          {"eval_every", c.eval_every},
          {"eval_rays", c.eval_rays},
          {"checkpoint_every", c.checkpoint_every}};
}

NerfConfig parse_nerf_config(const json& j) {
  try {
    NerfConfig c;
    c.width = j.value("width", c.width);
    c.depth = j.value("depth", c.depth);
    c.skip_layer = j.value("skip_layer", c.skip_layer);
    c.view_width = j.value("view_width", c.view_width);
    if (j.contains("position")) c.position = parse_encoding(j.at("position"), c.position);
    if (j.contains("direction")) c.direction = parse_encoding(j.at("direction"), c.direction);
    c.density_bias_init = j.value("density_bias_init", c.density_bias_init);
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("teacher network: ") + e.what());
  }
}

TeacherConfig parse_teacher_config(const json& j) {
  try {
    TeacherConfig c;
    if (j.contains("network")) c.network = parse_nerf_config(j.at("network"));
    c.samples_per_ray = j.value("samples_per_ray", c.samples_per_ray);
    c.batch_rays = j.value("batch_rays", c.batch_rays);
    c.iterations = j.value("iterations", c.iterations);
    c.base_lr = j.value("base_lr", c.base_lr);
    c.background = j.value("background", c.background);
    c.seed = j.value("seed", c.seed);
    c.log_every = j.value("log_every", c.log_every);
    c.eval_every = j.value("eval_every", c.eval_every);
    c.eval_rays = j.value("eval_rays", c.eval_rays);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("teacher config: ") + e.what());
  }
}

Sha256 save_teacher(const NerfMlp<float>& model, const TeacherConfig& config, const std::filesystem::path& path) {
  Checkpoint cp;
  cp.kind = ModelKind::teacher;
  TeacherConfig echo = config;
  echo.network = model.config();
  cp.config = to_json(echo);
  cp.layers = model.layers();
  return save_checkpoint(cp, path);
}

LoadedTeacher load_teacher(const std::filesystem::path& path) {
  auto loaded = load_checkpoint(path);
  auto& cp = loaded.checkpoint;
  if (cp.kind != ModelKind::teacher) throw FormatError("not a teacher checkpoint: " + path.string());
  TeacherConfig config;
  try {
    config = parse_teacher_config(cp.config);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("teacher checkpoint config: ") + e.what());
  }
  NerfMlp<float> model(config.network, 0);
  auto& layers = model.layers();
  if (layers.size() != cp.layers.size()) throw FormatError("teacher checkpoint: layer count mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& src = cp.layers[i];
    if (src.weight.rows() != layers[i].weight.rows() || src.weight.cols() != layers[i].weight.cols() ||
        src.activation != layers[i].activation) {
      throw FormatError("teacher checkpoint: layer " + std::to_string(i) + " does not match its config");
    }
    layers[i] = src;
  }
  return {std::move(model), config, loaded.digest};
}

}  // namespace r2l::teacher
