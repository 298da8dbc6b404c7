#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "r2l/common/digest.hpp"
#include "r2l/distill/bbox.hpp"
#include "r2l/teacher/teacher.hpp"
#include "r2l/teacher/teacher_io.hpp"

namespace r2l::distill {

/// One supervised ray: origin, unit direction and target color, stored as f32.
struct PseudoSample {
  std::array<float, 3> origin{};
  std::array<float, 3> direction{};
  std::array<float, 3> rgb{};

  friend bool operator==(const PseudoSample&, const PseudoSample&) = default;
};

/// Records [0, pseudo_count) are teacher renders; the rest are training-image pixels.
struct PseudoDataset {
  static constexpr std::uint32_t kVersion = 1;

  RayBoundingBox box;
  double near = 2.0;
  double far = 6.0;
  Sha256 teacher_digest{};
  std::uint64_t seed = 0;
  std::uint64_t pseudo_count = 0;
  std::vector<PseudoSample> records;

  std::size_t size() const { return records.size(); }
  /// The record as a ray; the stored direction is used as-is.
  Ray ray(std::size_t i) const;
  friend bool operator==(const PseudoDataset&, const PseudoDataset&) = default;
};

PseudoSample make_sample(const Ray& ray, const std::array<float, 3>& rgb);

/// Layout (little-endian): "R2LD" | version u32 | count u64 | pseudo_count u64 |
/// origin min xyz, origin max xyz, direction min xyz, direction max xyz (f64) |
/// near f64 | far f64 | teacher SHA-256 (32 bytes) | seed u64 |
/// count × 9 f32 | crc32 u32 of all preceding bytes.
std::vector<std::byte> serialize(const PseudoDataset& dataset);
/// Throws FormatError on bad magic/version, truncation, count mismatch or checksum failure.
PseudoDataset parse_pseudo_dataset(std::span<const std::byte> bytes);
void save_dataset(const PseudoDataset& dataset, const std::filesystem::path& path);
PseudoDataset load_dataset(const std::filesystem::path& path);

struct PseudoConfig {
  std::size_t rays = 0;       // teacher-labeled rays to synthesize
  bool include_real = false;  // append every training-image ray with its pixel color
  std::uint64_t seed = 0;
  double near = 2.0;
  double far = 6.0;
  int samples_per_ray = 0;    // 0 uses the teacher's training value
  std::size_t threads = 1;
  std::optional<Sha256> expected_teacher;  // refuse a different teacher when set
};

/// Throws DigestMismatch when `expected_teacher` is set and differs.
PseudoDataset generate_pseudo_dataset(const teacher::LoadedTeacher& teacher, const RayBoundingBox& box,
                                      const std::vector<teacher::View>& real_views, const PseudoConfig& config);

/// Renders the given pseudo records again with the teacher; [n × 3].
/// Throws DigestMismatch for a different teacher and UsageError for a real record.
tensor::Matrix<float> requery_teacher(const PseudoDataset& dataset, const teacher::LoadedTeacher& teacher,
                                      std::span<const std::size_t> indices, int samples_per_ray = 0,
                                      std::size_t threads = 1);

/// Number of requeried records whose stored RGB differs in any bit.
std::size_t count_requery_mismatches(const PseudoDataset& dataset, const teacher::LoadedTeacher& teacher,
                                     std::span<const std::size_t> indices, int samples_per_ray = 0,
                                     std::size_t threads = 1);

}  // namespace r2l::distill
