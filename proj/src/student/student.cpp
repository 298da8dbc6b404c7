#include "r2l/student/student.hpp"

#include "r2l/common/checkpoint.hpp"
#include "r2l/common/error.hpp"
#include "r2l/common/parallel.hpp"

namespace r2l::student {

using nlohmann::json;
using tensor::Matrix;

StudentModel make_student(const StudentConfig& config, const RayEncoder& encoder, std::uint64_t seed) {
  validate(encoder);
  return {encoder, ResidualMlp<float>(config, encoded_dim(encoder), seed)};
}

Matrix<float> predict_rays(const StudentModel& model, std::span<const Ray> rays, std::size_t threads,
                           QueryCounter* counter) {
  const RayEncoder encoder = with_mode(model.encoder, SamplingMode::test);
  const auto dim = static_cast<tensor::Index>(encoded_dim(encoder));
  Matrix<float> out(static_cast<tensor::Index>(rays.size()), 3);
  const std::size_t chunks = (rays.size() + kStudentChunkRays - 1) / kStudentChunkRays;
  parallel_shards(chunks, threads, [&](const ShardRange& shard) {
    Matrix<float> encoded(static_cast<tensor::Index>(kStudentChunkRays), dim);
    for (std::size_t chunk = shard.begin; chunk < shard.end; ++chunk) {
      const std::size_t begin = chunk * kStudentChunkRays;
      const std::size_t count = std::min(kStudentChunkRays, rays.size() - begin);
      for (std::size_t i = 0; i < kStudentChunkRays; ++i) {
        const Ray& ray = rays[begin + (i < count ? i : 0)];
        encode_ray<float>(encoder, ray, nullptr,
                          std::span<float>(encoded.row(static_cast<tensor::Index>(i)).data(),
                                           static_cast<std::size_t>(dim)));
      }
      const Matrix<float> rgb = model.network.forward(encoded);
      out.middleRows(static_cast<tensor::Index>(begin), static_cast<tensor::Index>(count)) =
          rgb.topRows(static_cast<tensor::Index>(count));
    }
  });
  if (counter) counter->queries += rays.size();
  return out;
}

StudentImage render_image_student(const StudentModel& model, const scene::CameraPose& pose, std::size_t threads) {
  scene::validate(pose);
  const auto rays = scene::generate_rays(pose);
  QueryCounter counter;
  const Matrix<float> rgb = predict_rays(model, rays, threads, &counter);
  StudentImage out{Image(pose.width, pose.height), counter.queries.load()};
  std::copy(rgb.data(), rgb.data() + rgb.size(), out.image.data().begin());
  return out;
}

json to_json(const StudentConfig& c) {
  return {{"name", c.name}, {"width", c.width}, {"depth", c.depth}, {"blocks", c.blocks()}, {"residual", c.residual}};
}

StudentConfig parse_student_config(const json& j) {
  try {
    StudentConfig c;
    if (j.contains("name") && !j.contains("width")) {
      c = build_config(j.at("name").get<std::string>());
    } else {
      c = custom_config(j.value("width", c.width), j.value("depth", c.depth));
    }
    c.residual = j.value("residual", c.residual);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("student config: ") + e.what());
  }
}

Sha256 save_student(const StudentModel& model, const std::filesystem::path& path, const json& extra) {
  Checkpoint cp;
  cp.kind = ModelKind::student;
  cp.config = extra.is_object() ? extra : json::object();
  cp.config["network"] = to_json(model.network.config());
  cp.config["block"] = "h + relu(L2 relu(L1 h)), no normalization";
  cp.encoder = to_section(model.encoder);
  cp.layers = model.network.layers();
  return save_checkpoint(cp, path);
}

LoadedStudent load_student(const std::filesystem::path& path) {
  auto loaded = load_checkpoint(path);
  auto& cp = loaded.checkpoint;
  if (cp.kind != ModelKind::student) throw FormatError("not a student checkpoint: " + path.string());
  if (!cp.encoder) throw FormatError("student checkpoint has no encoder section");
  StudentModel model;
  try {
    model = make_student(parse_student_config(cp.config.at("network")), from_section(*cp.encoder), 0);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("student checkpoint config: ") + e.what());
  } catch (const json::exception& e) {
    throw FormatError(std::string("student checkpoint config: ") + e.what());
  }
  auto& layers = model.network.layers();
  if (layers.size() != cp.layers.size()) throw FormatError("student checkpoint: layer count mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& src = cp.layers[i];
    if (src.weight.rows() != layers[i].weight.rows() || src.weight.cols() != layers[i].weight.cols() ||
        src.activation != layers[i].activation) {
      throw FormatError("student checkpoint: layer " + std::to_string(i) + " does not match its config");
    }
    layers[i] = src;
  }
  return {std::move(model), std::move(cp.config), loaded.digest};
}

}  // namespace r2l::student
