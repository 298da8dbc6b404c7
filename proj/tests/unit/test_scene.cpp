#include <doctest.h>

#include <cmath>

#include "r2l/common/error.hpp"
#include "r2l/scene/blob_scene.hpp"
#include "r2l/scene/camera.hpp"
#include "r2l/scene/reference.hpp"
#include "r2l/scene/scene_file.hpp"
#include "r2l/teacher/quadrature.hpp"

using namespace r2l;
using namespace r2l::scene;

namespace {

BlobScene single_blob(double sigma_max, double kappa = 0.0, Vec3 lobe = Vec3(0, 0, 1)) {
  Blob b;
  b.center = Vec3::Zero();
  b.scale = 0.5;
  b.peak_density = sigma_max;
  b.albedo = {0.2, 0.7, 0.4};
  b.view_dependence = kappa;
  b.lobe = lobe;
  return BlobScene({b}, {1.0, 1.0, 1.0});
}

Ray axis_ray() {
  Ray r;
  r.origin = Vec3(0, 0, 4);
  r.direction = Vec3(0, 0, -1);
  r.near = 2.0;
  r.far = 6.0;
  return r;
}

}  // namespace

TEST_CASE("query_field: Gaussian tail far from every blob") {
  const auto scene = default_blob_scene();
  for (const auto& b : scene.blobs()) CHECK(b.scale <= 0.45);
  // 8 scales of the widest blob beyond the farthest center.
  CHECK(scene.query(Vec3(12, 12, 12), Vec3(0, 0, 1)).sigma < 1e-10);
  CHECK(single_blob(40).query(Vec3(8 * 0.5, 0, 0), Vec3(1, 0, 0)).sigma < 1e-10);
}

TEST_CASE("query_field: blob center with no view dependence returns peak density and albedo") {
  const auto s = single_blob(40).query(Vec3::Zero(), Vec3(0, 1, 0));
  CHECK(s.sigma == 40.0);
  CHECK(s.color[0] == doctest::Approx(0.2));
  CHECK(s.color[1] == doctest::Approx(0.7));
  CHECK(s.color[2] == doctest::Approx(0.4));
}

TEST_CASE("query_field: full view dependence perpendicular to the lobe is black") {
  const auto s = single_blob(40, 1.0, Vec3(0, 0, 1)).query(Vec3::Zero(), Vec3(1, 0, 0));
  CHECK(s.color[0] == 0.0);
  CHECK(s.color[1] == 0.0);
  CHECK(s.color[2] == 0.0);
}

TEST_CASE("query_field: density nonnegative, colors in [0,1] everywhere") {
  const auto scene = default_blob_scene();
  Rng rng(4);
  for (int i = 0; i < 20000; ++i) {
    const Vec3 p(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
    const Vec3 d = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
    const auto s = scene.query(p, d);
    REQUIRE(s.sigma >= 0.0);
    for (double c : s.color) REQUIRE((c >= 0.0 && c <= 1.0));
  }
}

TEST_CASE("scene construction validates its inputs") {
  CHECK_THROWS_AS(BlobScene({}, {1, 1, 1}), ConfigError);
  Blob bad;
  bad.scale = 0.0;
  CHECK_THROWS_AS(BlobScene({bad}, {1, 1, 1}), ConfigError);
  Blob color;
  color.albedo = {1.5, 0, 0};
  CHECK_THROWS_AS(BlobScene({color}, {1, 1, 1}), ConfigError);
}

TEST_CASE("generate_ray: optical axis, mirror symmetry and unit norm") {
  CameraPose pose;
  pose.width = 65;
  pose.height = 33;
  pose.focal = 50;
  pose.near = 1;
  pose.far = 5;
  const Ray center = generate_ray(pose, 16, 32);
  CHECK(center.direction.x() == 0.0);
  CHECK(center.direction.y() == 0.0);
  CHECK(center.direction.z() == -1.0);
  CHECK(center.near == 1.0);
  CHECK(center.far == 5.0);
  for (int r = 0; r < pose.height; r += 4) {
    for (int c = 0; c < pose.width; ++c) {
      const Ray a = generate_ray(pose, r, c);
      const Ray b = generate_ray(pose, r, pose.width - 1 - c);
      CHECK(a.direction.x() == doctest::Approx(-b.direction.x()).epsilon(1e-15));
      CHECK(a.direction.y() == b.direction.y());
      CHECK(std::abs(a.direction.norm() - 1.0) < 1e-6);
    }
  }
  CHECK_THROWS_AS(generate_ray(pose, -1, 0), UsageError);
  CHECK_THROWS_AS(generate_ray(pose, 0, 65), UsageError);
}

TEST_CASE("camera pose validation") {
  CameraPose pose;
  pose.rotation(0, 0) = 2.0;
  CHECK_THROWS_AS(validate(pose), UsageError);
  CameraPose depth;
  depth.near = 3;
  depth.far = 2;
  CHECK_THROWS_AS(validate(depth), UsageError);
}

TEST_CASE("sample_poses: start pose, orthonormality, determinism, look-at") {
  OrbitConfig orbit;
  const auto one = sample_poses(orbit, 1, 77);
  REQUIRE(one.size() == 1);
  const auto expect = look_at_origin(orbit, orbit.elevation_start_deg, orbit.azimuth_start_deg);
  CHECK(one[0].position.isApprox(expect.position, 1e-15));

  const auto a = sample_poses(orbit, 40, 5);
  const auto b = sample_poses(orbit, 40, 5);
  REQUIRE(a.size() == 40);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].position == b[i].position);
    CHECK(a[i].rotation == b[i].rotation);
    CHECK((a[i].rotation.transpose() * a[i].rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(a[i].position.norm() == doctest::Approx(orbit.radius));
    // The optical axis passes through the origin.
    const Vec3 axis = a[i].rotation * Vec3(0, 0, -1);
    CHECK((a[i].position + orbit.radius * axis).norm() < 1e-9);
    const double elev = std::asin(a[i].position.y() / orbit.radius) * 180.0 / M_PI;
    CHECK(elev >= orbit.elevation_min_deg - 1e-9);
    CHECK(elev <= orbit.elevation_max_deg + 1e-9);
  }
}

TEST_CASE("train and test pose splits are disjoint") {
  const SceneDescription desc;
  const auto train = train_poses(desc);
  const auto test = test_poses(desc);
  CHECK(train.size() == 40);
  CHECK(test.size() == 10);
  for (const auto& t : test) {
    for (const auto& r : train) CHECK((t.position - r.position).norm() > 1e-6);
  }
}

TEST_CASE("reference_render: empty scene returns the background exactly") {
  const auto s = single_blob(0.0);
  const Rgb c = reference_render(s, axis_ray(), 1024);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == 1.0);
  CHECK(c[2] == 1.0);
}

TEST_CASE("reference_render: opaque blob on the ray returns its albedo") {
  const auto s = single_blob(400.0);
  const Rgb c = reference_render(s, axis_ray(), 1024);
  CHECK(std::abs(c[0] - 0.2) < 1e-2);
  CHECK(std::abs(c[1] - 0.7) < 1e-2);
  CHECK(std::abs(c[2] - 0.4) < 1e-2);
}

TEST_CASE("reference_render self-converges between 1024 and 2048 samples") {
  const SceneDescription desc;
  const auto poses = test_poses(desc);
  double worst = 0.0;
  for (const auto& pose : poses) {
    for (int r = 0; r < pose.height; r += 7) {
      for (int c = 0; c < pose.width; c += 7) {
        const Ray ray = generate_ray(pose, r, c);
        const Rgb a = reference_render(desc.scene, ray, 1024);
        const Rgb b = reference_render(desc.scene, ray, 2048);
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]));
      }
    }
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("reference_render rejects fewer than two samples") {
  CHECK_THROWS_AS(reference_render(single_blob(1), axis_ray(), 1), UsageError);
}

TEST_CASE("splitting a ray at its midpoint and compositing the parts matches the whole") {
  const auto scene = default_blob_scene();
  const SceneDescription desc;
  const auto pose = test_poses(desc)[3];
  for (int trial = 0; trial < 50; ++trial) {
    const Ray ray = generate_ray(pose, 3 + trial, 10 + trial / 2);
    constexpr int n = 256;
    const auto depths = teacher::stratified_depths(ray.near, ray.far, n, teacher::SamplingMode::test);
    std::vector<double> delta(n);
    teacher::interval_lengths(depths, ray.far, delta);
    teacher::QuadratureSamples<double> whole, first, second;
    for (int i = 0; i < n; ++i) {
      const auto f = scene.query(ray.at(depths[static_cast<std::size_t>(i)]), ray.direction);
      auto& half = i < n / 2 ? first : second;
      for (auto* s : {&whole, &half}) {
        s->sigma.push_back(f.sigma);
        s->delta.push_back(delta[static_cast<std::size_t>(i)]);
        s->color.push_back(f.color);
      }
    }
    const auto bg = scene.background();
    const auto full = teacher::composite_ray(whole, bg);
    const auto s1 = teacher::composite_segment(first);
    const auto s2 = teacher::composite_segment(second);
    for (std::size_t k = 0; k < 3; ++k) {
      const double joined = s1.rgb[k] + s1.transmittance * s2.rgb[k] + s1.transmittance * s2.transmittance * bg[k];
      CHECK(std::abs(joined - full.rgb[k]) < 1e-6);
    }
  }
}

TEST_CASE("rendering the same pose twice is bit-identical") {
  SceneDescription desc;
  const auto pose = train_poses(desc)[0];
  const Image a = reference_image(desc.scene, pose, 128);
  const Image b = reference_image(desc.scene, pose, 128);
  CHECK(a == b);
}

TEST_CASE("scene description round-trips through its JSON form") {
  SceneDescription desc;
  desc.train_views = 7;
  desc.orbit.width = 17;
  const auto back = parse_scene_description(to_json(desc));
  CHECK(back.train_views == 7);
  CHECK(back.orbit.width == 17);
  CHECK(back.scene.blobs().size() == desc.scene.blobs().size());
  CHECK(back.scene.blobs()[1].lobe.isApprox(desc.scene.blobs()[1].lobe, 1e-15));
  const auto pa = train_poses(desc);
  const auto pb = train_poses(back);
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].position == pb[i].position);
  CHECK_THROWS_AS(parse_scene_description(nlohmann::json{{"near", 5.0}, {"far", 1.0}}), ConfigError);
  CHECK_THROWS_AS(parse_scene_description(nlohmann::json{{"blobs", {{{"scale", 1.0}}}}}), ConfigError);
}
