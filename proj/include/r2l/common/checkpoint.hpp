#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "r2l/common/digest.hpp"
#include "r2l/tensor/dense.hpp"

namespace r2l {

enum class ModelKind : std::uint32_t { teacher = 1, student = 2 };

/// Ray-encoder description stored alongside student weights so a checkpoint is self-describing.
struct EncoderSection {
  std::uint32_t kind = 0;  // 0 = K-point, 1 = Plücker
  std::uint32_t points = 16;
  std::uint32_t octaves = 10;
  bool include_raw = true;
  std::uint8_t mode = 1;  // 0 = train (stratified), 1 = test (midpoints)

  friend bool operator==(const EncoderSection&, const EncoderSection&) = default;
};

/// Container layout (little-endian):
///   "R2LC" | version u32 | kind u32 | config_len u64 | config JSON bytes |
///   has_encoder u8 | [kind u32, points u32, octaves u32, raw u8, mode u8] |
///   layer_count u32 | per layer: activation u32, rows u64, cols u64,
///   weight f32[rows·cols] (row-major), bias f32[rows] | crc32 u32 of all preceding bytes.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  ModelKind kind = ModelKind::teacher;
  nlohmann::json config;
  std::optional<EncoderSection> encoder;
  std::vector<tensor::DenseLayer<float>> layers;
};

std::vector<std::byte> serialize(const Checkpoint& checkpoint);
/// Throws FormatError on bad magic, unsupported version, truncation or checksum mismatch.
Checkpoint parse_checkpoint(std::span<const std::byte> bytes);

/// Returns the SHA-256 of the written bytes (the model digest).
Sha256 save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);

struct LoadedCheckpoint {
  Checkpoint checkpoint;
  Sha256 digest;
};
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace r2l
