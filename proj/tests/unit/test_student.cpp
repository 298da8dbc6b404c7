#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "../support/gradcheck.hpp"
#include "r2l/common/binary_io.hpp"
#include "r2l/common/error.hpp"
#include "r2l/scene/camera.hpp"
#include "r2l/student/ray_encoder.hpp"
#include "r2l/student/residual_mlp.hpp"
#include "r2l/student/student.hpp"

using namespace r2l;
using namespace r2l::student;
using tensor::Index;
using tensor::Matrix;

namespace {

Ray random_ray(Rng& rng) {
  Ray r;
  r.origin = Vec3(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4));
  r.direction = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
  r.near = 2.0;
  r.far = 6.0;
  return r;
}

template <typename T>
Matrix<T> random_batch(Rng& rng, Index rows, Index cols) {
  Matrix<T> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(rng.normal());
  return m;
}

}  // namespace

TEST_CASE("K-point encoder: test-mode points are bin midpoints in depth order") {
  Ray ray;
  ray.origin = Vec3::Zero();
  ray.direction = Vec3(0, 0, 1);
  ray.near = 0.0;
  ray.far = 4.0;
  const auto pts = ray_points(KPointEncoder{2, {0, true}, SamplingMode::test}, ray, nullptr);
  CHECK(pts == std::vector<double>{0, 0, 1, 0, 0, 3});
}

TEST_CASE("K-point encoder: train mode needs an rng and stays inside each bin") {
  Rng rng(1);
  const Ray ray = random_ray(rng);
  const KPointEncoder enc{4, {2, true}, SamplingMode::train};
  CHECK_THROWS_AS(ray_points(enc, ray, nullptr), UsageError);
  for (int t = 0; t < 200; ++t) {
    const auto pts = ray_points(enc, ray, &rng);
    for (int i = 0; i < 4; ++i) {
      const Vec3 p(pts[3 * static_cast<std::size_t>(i)], pts[3 * static_cast<std::size_t>(i) + 1], pts[3 * static_cast<std::size_t>(i) + 2]);
      const double depth = (p - ray.origin).dot(ray.direction);
      REQUIRE(depth >= 2.0 + i - 1e-12);
      REQUIRE(depth <= 3.0 + i + 1e-12);
    }
  }
}

TEST_CASE("encoded dimension formula") {
  CHECK(encoded_dim(KPointEncoder{16, {10, true}}) == 1008);
  CHECK(ray_points(KPointEncoder{16, {10, true}}, Ray{Vec3::Zero(), Vec3(0, 0, -1), 2, 6}, nullptr).size() == 48);
  Rng rng(4);
  for (int k = 2; k <= 32; k += 3) {
    for (int l = 0; l <= 12; l += 4) {
      for (bool raw : {false, true}) {
        const RayEncoder enc = KPointEncoder{k, {l, raw}};
        const std::size_t expect = 3 * static_cast<std::size_t>(k) * (2 * static_cast<std::size_t>(l) + (raw ? 1 : 0));
        CHECK(encoded_dim(enc) == expect);
        if (expect == 0) continue;
        std::vector<float> out(expect);
        encode_ray<float>(enc, random_ray(rng), nullptr, out);
        const RayEncoder pl = PluckerEncoder{{l, raw}};
        CHECK(encoded_dim(pl) == 6 * (2 * static_cast<std::size_t>(l) + (raw ? 1 : 0)));
      }
    }
  }
}

TEST_CASE("encoder validation") {
  CHECK_THROWS_AS(validate(RayEncoder{KPointEncoder{1, {10, true}}}), ConfigError);
  CHECK_NOTHROW(validate(RayEncoder{KPointEncoder{2, {10, true}}}));
}

TEST_CASE("Pluecker coordinates: zero offset gives zero moment; moment orthogonal to direction") {
  Ray r;
  r.origin = Vec3::Zero();
  r.direction = Vec3(0.6, 0.0, -0.8);
  const auto pl = plucker_coordinates(r);
  CHECK(pl[3] == 0.0);
  CHECK(pl[4] == 0.0);
  CHECK(pl[5] == 0.0);
  Rng rng(7);
  for (int t = 0; t < 10000; ++t) {
    const Ray q = random_ray(rng);
    const auto c = plucker_coordinates(q);
    const double dot = c[0] * c[3] + c[1] * c[4] + c[2] * c[5];
    REQUIRE(std::abs(dot) <= 8 * std::numeric_limits<double>::epsilon() * q.origin.norm());
  }
}

TEST_CASE("encoder sections round-trip") {
  const RayEncoder a = KPointEncoder{16, {10, true}, SamplingMode::train};
  const RayEncoder b = PluckerEncoder{{6, false}};
  CHECK(from_section(to_section(a)) == a);
  CHECK(from_section(to_section(b)) == b);
  EncoderSection bad;
  bad.kind = 9;
  CHECK_THROWS_AS(from_section(bad), FormatError);
}

TEST_CASE("build_config: named and custom configurations") {
  CHECK(build_config("W256D88").blocks() == 43);
  const auto c = build_config("W181D88");
  CHECK(c.width == 181);
  CHECK(c.blocks() == 43);
  CHECK(build_config("W256D44").blocks() == 21);
  CHECK(build_config("W363D22").blocks() == 10);
  CHECK(custom_config(64, 24).blocks() == 11);
  CHECK_THROWS_AS(build_config("W256D87"), ConfigError);
  CHECK_THROWS_AS(custom_config(64, 2), ConfigError);
  CHECK_THROWS_AS(build_config("wide"), ConfigError);
}

TEST_CASE("student_forward: all-zero parameters give mid-gray") {
  ResidualMlp<float> net(custom_config(16, 8), 12, 1);
  for (auto& l : net.layers()) {
    l.weight.setZero();
    l.bias.setZero();
  }
  Rng rng(2);
  const auto out = student_forward(net, random_batch<float>(rng, 5, 12));
  CHECK((out.array() == 0.5f).all());
}

TEST_CASE("student_forward: zeroed blocks are identity maps regardless of depth") {
  Rng rng(3);
  const auto x = random_batch<double>(rng, 6, 10);
  ResidualMlp<double> shallow(custom_config(16, 4), 10, 5);
  ResidualMlp<double> deep(custom_config(16, 40), 10, 5);
  deep.layers().front() = shallow.layers().front();
  deep.layers().back() = shallow.layers().back();
  for (auto* net : {&shallow, &deep}) {
    auto& layers = net->layers();
    for (std::size_t i = 1; i + 1 < layers.size(); ++i) {
      layers[i].weight.setZero();
      layers[i].bias.setZero();
    }
  }
  const auto h = tensor::forward_dense(shallow.layers().front(), x);
  const auto expect = tensor::forward_dense(shallow.layers().back(), h);
  CHECK(shallow.forward(x) == expect);
  CHECK(deep.forward(x) == expect);
}

TEST_CASE("student_forward: one query per ray, dimension checks, output range") {
  ResidualMlp<float> net(custom_config(32, 10), 24, 9);
  Rng rng(4);
  QueryCounter counter;
  const auto out = student_forward(net, random_batch<float>(rng, 37, 24), &counter);
  CHECK(counter.queries == 37);
  CHECK((out.array() > 0.0f).all());
  CHECK((out.array() < 1.0f).all());
  CHECK_THROWS_AS(student_forward(net, random_batch<float>(rng, 3, 23)), ConfigError);
}

TEST_CASE("ResidualMlp gradients match central differences, with and without skips") {
  for (bool residual : {true, false}) {
    auto cfg = custom_config(6, 8);
    cfg.residual = residual;
    ResidualMlp<double> net(cfg, 5, 17);
    for (auto& l : net.layers()) {
      for (Index i = 0; i < l.bias.size(); ++i) l.bias[i] = 0.05 * (double(i % 3) - 1.0);
    }
    Rng rng(8);
    const auto x = random_batch<double>(rng, 4, 5);
    Matrix<double> y(4, 3);
    for (Index i = 0; i < y.size(); ++i) y.data()[i] = rng.uniform();
    tensor::GradientTape<double> tape(net.layers());
    const auto pred = net.forward(x, tape);
    const Matrix<double> gin = net.backward(tape, tensor::mse_loss_grad<double>(pred, y), true);
    const auto analytic = tensor::flatten_gradients<double>(std::as_const(tape).grads());
    auto params = tensor::flatten_parameters<double>(net.layers());
    const auto numeric = testing::central_difference(params, [&] {
      for (std::size_t i = 0; i < params.size(); ++i) tensor::parameter_at<double>(net.layers(), i) = params[i];
      return tensor::mse_loss<double>(net.forward(x), y).loss;
    });
    CHECK(testing::max_relative_error(analytic, numeric) < 1e-4);
    Matrix<double> xin = x;
    const auto numeric_in = testing::central_difference(std::span<double>(xin.data(), 20), [&] {
      return tensor::mse_loss<double>(net.forward(xin), y).loss;
    });
    CHECK(testing::max_relative_error(std::span<const double>(gin.data(), 20), numeric_in) < 1e-4);
  }
}

TEST_CASE("88-layer student passes a nonzero gradient to its input layer at initialization") {
  ResidualMlp<float> net(custom_config(32, 88), 1008, 1);
  Rng rng(6);
  const auto x = random_batch<float>(rng, 16, 1008);
  Matrix<float> y(16, 3);
  for (Index i = 0; i < y.size(); ++i) y.data()[i] = static_cast<float>(rng.uniform());
  tensor::GradientTape<float> tape(net.layers());
  const auto pred = net.forward(x, tape);
  CHECK(pred.allFinite());
  net.backward(tape, tensor::mse_loss_grad<float>(pred, y));
  CHECK(tape.grad(0).weight.norm() > 1e-12);

  auto plain = custom_config(32, 88);
  plain.residual = false;
  ResidualMlp<float> no_skip(plain, 1008, 1);
  CHECK(no_skip.forward(x).allFinite());
}

TEST_CASE("render_image_student: one query per pixel and bit-identical repeats") {
  const auto model = make_student(custom_config(16, 6), KPointEncoder{4, {3, true}}, 2);
  const auto pose = scene::sample_poses(scene::OrbitConfig{}, 1, 0)[0];
  const auto a = render_image_student(model, pose);
  const auto b = render_image_student(model, pose, 3);
  CHECK(a.queries == 4096);
  CHECK(a.image == b.image);
  for (float v : a.image.data()) REQUIRE((v > 0.0f && v < 1.0f));
}

TEST_CASE("predict_rays ignores the stored training mode and neighbors") {
  auto model = make_student(custom_config(16, 6), KPointEncoder{4, {3, true}, SamplingMode::train}, 2);
  const auto pose = scene::sample_poses(scene::OrbitConfig{}, 1, 0)[0];
  const auto rays = scene::generate_rays(pose);
  const auto all = predict_rays(model, rays);
  const std::vector<Ray> some{rays[4000], rays[5]};
  const auto two = predict_rays(model, some);
  CHECK(two.row(0) == all.row(4000));
  CHECK(two.row(1) == all.row(5));
}

TEST_CASE("student checkpoints round-trip with their encoder section") {
  auto cfg = custom_config(16, 6);
  cfg.residual = false;
  const auto model = make_student(cfg, KPointEncoder{8, {5, false}, SamplingMode::train}, 4);
  const auto path = std::filesystem::temp_directory_path() / "r2l_test_student.r2lc";
  const auto digest = save_student(model, path, {{"note", "unit"}});
  const auto back = load_student(path);
  CHECK(back.digest == digest);
  CHECK(back.model.encoder == model.encoder);
  CHECK(back.model.network.config() == cfg);
  CHECK(back.config.at("note") == "unit");
  for (std::size_t i = 0; i < model.network.layers().size(); ++i) {
    CHECK(back.model.network.layers()[i].weight == model.network.layers()[i].weight);
    CHECK(back.model.network.layers()[i].bias == model.network.layers()[i].bias);
  }
  auto bytes = read_file(path);
  bytes[bytes.size() - 1] ^= std::byte{0x80};
  write_file(path, bytes);
  CHECK_THROWS_AS(load_student(path), FormatError);
}
