#include "r2l/student/ray_encoder.hpp"

#include <Eigen/Geometry>

#include "r2l/common/error.hpp"

namespace r2l::student {

namespace {
template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;
}  // namespace

void validate(const RayEncoder& encoder) {
  std::visit(Overloaded{[](const KPointEncoder& e) {
                          if (e.points < 2) throw ConfigError("K-point encoder needs K ≥ 2");
                          if (e.encoding.octaves < 0) throw ConfigError("encoder needs L ≥ 0");
                        },
                        [](const PluckerEncoder& e) {
                          if (e.encoding.octaves < 0) throw ConfigError("encoder needs L ≥ 0");
                        }},
             encoder);
}

std::size_t encoded_dim(const RayEncoder& encoder) {
  return std::visit(
      Overloaded{[](const KPointEncoder& e) { return e.encoding.output_dim(3 * static_cast<std::size_t>(e.points)); },
                 [](const PluckerEncoder& e) { return e.encoding.output_dim(6); }},
      encoder);
}

RayEncoder with_mode(const RayEncoder& encoder, SamplingMode mode) {
  RayEncoder out = encoder;
  if (auto* k = std::get_if<KPointEncoder>(&out)) k->mode = mode;
  return out;
}

std::vector<double> ray_points(const KPointEncoder& e, const Ray& ray, Rng* rng) {
  if (e.mode == SamplingMode::train && rng == nullptr) throw UsageError("train-mode ray encoding needs an rng");
  const auto n = static_cast<std::size_t>(e.points);
  std::vector<double> depths(n);
  teacher::stratified_depths(ray.near, ray.far, e.mode, rng, depths);
  std::vector<double> pts(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p = ray.at(depths[i]);
    pts[3 * i] = p.x();
    pts[3 * i + 1] = p.y();
    pts[3 * i + 2] = p.z();
  }
  return pts;
}

std::array<double, 6> plucker_coordinates(const Ray& ray) {
  const Vec3& d = ray.direction;
  const Vec3 m = ray.origin.cross(d);
  return {d.x(), d.y(), d.z(), m.x(), m.y(), m.z()};
}

template <typename T>
void encode_ray(const RayEncoder& encoder, const Ray& ray, Rng* rng, std::span<T> out) {
  if (out.size() != encoded_dim(encoder)) throw UsageError("encode_ray: output buffer has the wrong size");
  std::visit(Overloaded{[&](const KPointEncoder& e) {
                          const auto pts = ray_points(e, ray, rng);
                          teacher::encode<T>(e.encoding, pts, out);
                        },
                        [&](const PluckerEncoder& e) {
                          const auto pl = plucker_coordinates(ray);
                          teacher::encode<T>(e.encoding, pl, out);
                        }},
             encoder);
}

template <typename T>
tensor::Matrix<T> encode_rays(const RayEncoder& encoder, std::span<const Ray> rays, Rng* rng) {
  const std::size_t dim = encoded_dim(encoder);
  tensor::Matrix<T> out(static_cast<tensor::Index>(rays.size()), static_cast<tensor::Index>(dim));
  for (std::size_t r = 0; r < rays.size(); ++r) {
    encode_ray<T>(encoder, rays[r], rng, std::span<T>(out.row(static_cast<tensor::Index>(r)).data(), dim));
  }
  return out;
}

EncoderSection to_section(const RayEncoder& encoder) {
  return std::visit(Overloaded{[](const KPointEncoder& e) {
                                 return EncoderSection{0, static_cast<std::uint32_t>(e.points),
                                                       static_cast<std::uint32_t>(e.encoding.octaves),
                                                       e.encoding.include_raw,
                                                       static_cast<std::uint8_t>(e.mode == SamplingMode::train ? 0 : 1)};
                               },
                               [](const PluckerEncoder& e) {
                                 return EncoderSection{1, 0, static_cast<std::uint32_t>(e.encoding.octaves),
                                                       e.encoding.include_raw, 1};
                               }},
                    encoder);
}

RayEncoder from_section(const EncoderSection& s) {
  const PositionalEncoding pe{static_cast<int>(s.octaves), s.include_raw};
  if (s.kind == 0) {
    return KPointEncoder{static_cast<int>(s.points), pe, s.mode == 0 ? SamplingMode::train : SamplingMode::test};
  }
  if (s.kind == 1) return PluckerEncoder{pe};
  throw FormatError("unknown ray encoder kind " + std::to_string(s.kind));
}

template void encode_ray<float>(const RayEncoder&, const Ray&, Rng*, std::span<float>);
template void encode_ray<double>(const RayEncoder&, const Ray&, Rng*, std::span<double>);
template tensor::Matrix<float> encode_rays<float>(const RayEncoder&, std::span<const Ray>, Rng*);
template tensor::Matrix<double> encode_rays<double>(const RayEncoder&, std::span<const Ray>, Rng*);

}  // namespace r2l::student
