#include "r2l/distill/pseudo_dataset.hpp"

#include <bit>
#include <cstring>

#include "r2l/common/binary_io.hpp"
#include "r2l/common/error.hpp"

namespace r2l::distill {

namespace {

constexpr char kMagic[4] = {'R', '2', 'L', 'D'};
constexpr std::size_t kFloatsPerRecord = 9;

void put_vec(ByteWriter& w, const Vec3& v) {
  w.put<double>(v.x());
  w.put<double>(v.y());
  w.put<double>(v.z());
}

Vec3 get_vec(ByteReader& r) {
  const double x = r.get<double>();
  const double y = r.get<double>();
  const double z = r.get<double>();
  return {x, y, z};
}

int resolve_samples(const teacher::LoadedTeacher& t, int requested) {
  return requested > 0 ? requested : t.config.samples_per_ray;
}

void check_teacher(const PseudoDataset& d, const teacher::LoadedTeacher& t) {
  if (d.teacher_digest != t.digest) {
    throw DigestMismatch("dataset was generated by teacher " + to_hex(d.teacher_digest) + ", not " +
                         to_hex(t.digest));
  }
}

}  // namespace

Ray PseudoDataset::ray(std::size_t i) const {
  const PseudoSample& s = records.at(i);
  Ray r;
  r.origin = Vec3(s.origin[0], s.origin[1], s.origin[2]);
  r.direction = Vec3(s.direction[0], s.direction[1], s.direction[2]);
  r.near = near;
  r.far = far;
  return r;
}

PseudoSample make_sample(const Ray& ray, const std::array<float, 3>& rgb) {
  PseudoSample s;
  for (int k = 0; k < 3; ++k) {
    s.origin[static_cast<std::size_t>(k)] = static_cast<float>(ray.origin[k]);
    s.direction[static_cast<std::size_t>(k)] = static_cast<float>(ray.direction[k]);
  }
  s.rgb = rgb;
  return s;
}

std::vector<std::byte> serialize(const PseudoDataset& d) {
  ByteWriter w;
  w.put_bytes(std::string_view(kMagic, 4));
  w.put<std::uint32_t>(PseudoDataset::kVersion);
  w.put<std::uint64_t>(d.records.size());
  w.put<std::uint64_t>(d.pseudo_count);
  put_vec(w, d.box.origin_min);
  put_vec(w, d.box.origin_max);
  put_vec(w, d.box.direction_min);
  put_vec(w, d.box.direction_max);
  w.put<double>(d.near);
  w.put<double>(d.far);
  w.put_bytes(std::as_bytes(std::span(d.teacher_digest)));
  w.put<std::uint64_t>(d.seed);
  static_assert(sizeof(PseudoSample) == kFloatsPerRecord * sizeof(float));
  w.put_array(std::span<const float>(reinterpret_cast<const float*>(d.records.data()),
                                     d.records.size() * kFloatsPerRecord));
  w.put<std::uint32_t>(crc32(w.bytes()));
  return w.release();
}

PseudoDataset parse_pseudo_dataset(std::span<const std::byte> bytes) {
  if (bytes.size() < 8) throw FormatError("pseudo dataset: file too short");
  ByteReader r(bytes);
  if (std::memcmp(r.get_bytes(4).data(), kMagic, 4) != 0) throw FormatError("pseudo dataset: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != PseudoDataset::kVersion) {
    throw FormatError("pseudo dataset: unsupported version " + std::to_string(version));
  }
  if (bytes.size() < 4 + 4 + 4) throw FormatError("pseudo dataset: file too short");
  {
    ByteReader tail(bytes.subspan(bytes.size() - 4));
    if (tail.get<std::uint32_t>() != crc32(bytes.first(bytes.size() - 4))) {
      throw FormatError("pseudo dataset: checksum mismatch");
    }
  }
  PseudoDataset d;
  const auto count = r.get<std::uint64_t>();
  d.pseudo_count = r.get<std::uint64_t>();
  d.box.origin_min = get_vec(r);
  d.box.origin_max = get_vec(r);
  d.box.direction_min = get_vec(r);
  d.box.direction_max = get_vec(r);
  d.near = r.get<double>();
  d.far = r.get<double>();
  const auto digest = r.get_bytes(d.teacher_digest.size());
  std::memcpy(d.teacher_digest.data(), digest.data(), digest.size());
  d.seed = r.get<std::uint64_t>();
  if (d.pseudo_count > count) throw FormatError("pseudo dataset: pseudo count exceeds record count");
  const std::size_t record_bytes = kFloatsPerRecord * sizeof(float);
  if (r.remaining() != count * record_bytes + 4) throw FormatError("pseudo dataset: record count mismatch");
  d.records.resize(count);
  r.get_array(std::span<float>(reinterpret_cast<float*>(d.records.data()), count * kFloatsPerRecord));
  return d;
}

void save_dataset(const PseudoDataset& dataset, const std::filesystem::path& path) {
  write_file(path, serialize(dataset));
}

PseudoDataset load_dataset(const std::filesystem::path& path) { return parse_pseudo_dataset(read_file(path)); }

PseudoDataset generate_pseudo_dataset(const teacher::LoadedTeacher& t, const RayBoundingBox& box,
                                      const std::vector<teacher::View>& real_views, const PseudoConfig& config) {
  if (config.expected_teacher && *config.expected_teacher != t.digest) {
    throw DigestMismatch("teacher digest " + to_hex(t.digest) + " does not match the expected " +
                         to_hex(*config.expected_teacher));
  }
  PseudoDataset d;
  d.box = box;
  d.near = config.near;
  d.far = config.far;
  d.teacher_digest = t.digest;
  d.seed = config.seed;

  Rng rng(derive_seed(config.seed, 0x9e5d));
  const auto sampled = sample_pseudo_rays(box, config.rays, config.near, config.far, rng);
  // Rays are rounded to their stored precision before labeling so a stored
  // record can be re-rendered exactly.
  d.records.reserve(config.rays);
  for (const Ray& ray : sampled) d.records.push_back(make_sample(ray, {}));
  std::vector<Ray> stored(d.records.size());
  for (std::size_t i = 0; i < stored.size(); ++i) stored[i] = d.ray(i);
  const auto rgb = teacher::render_rays(t.model, stored, resolve_samples(t, config.samples_per_ray),
                                        t.config.background, config.threads);
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const auto row = rgb.row(static_cast<tensor::Index>(i));
    d.records[i].rgb = {row(0), row(1), row(2)};
  }
  d.pseudo_count = d.records.size();

  if (config.include_real) {
    for (const auto& view : real_views) {
      if (view.pose.near != config.near || view.pose.far != config.far) {
        throw ConfigError("real views must share the dataset's near/far bounds");
      }
      for (int r = 0; r < view.pose.height; ++r) {
        for (int c = 0; c < view.pose.width; ++c) {
          const float* px = view.image.pixel(r, c);
          d.records.push_back(make_sample(scene::generate_ray(view.pose, r, c), {px[0], px[1], px[2]}));
        }
      }
    }
  }
  return d;
}

tensor::Matrix<float> requery_teacher(const PseudoDataset& dataset, const teacher::LoadedTeacher& t,
                                      std::span<const std::size_t> indices, int samples_per_ray,
                                      std::size_t threads) {
  check_teacher(dataset, t);
  std::vector<Ray> rays;
  rays.reserve(indices.size());
  for (const std::size_t i : indices) {
    if (i >= dataset.pseudo_count) throw UsageError("record " + std::to_string(i) + " is not teacher-labeled");
    rays.push_back(dataset.ray(i));
  }
  return teacher::render_rays(t.model, rays, resolve_samples(t, samples_per_ray), t.config.background, threads);
}

std::size_t count_requery_mismatches(const PseudoDataset& dataset, const teacher::LoadedTeacher& t,
                                     std::span<const std::size_t> indices, int samples_per_ray,
                                     std::size_t threads) {
  const auto rgb = requery_teacher(dataset, t, indices, samples_per_ray, threads);
  std::size_t bad = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto& stored = dataset.records[indices[k]].rgb;
    for (int c = 0; c < 3; ++c) {
      if (std::bit_cast<std::uint32_t>(stored[static_cast<std::size_t>(c)]) !=
          std::bit_cast<std::uint32_t>(rgb(static_cast<tensor::Index>(k), c))) {
        ++bad;
        break;
      }
    }
  }
  return bad;
}

}  // namespace r2l::distill
