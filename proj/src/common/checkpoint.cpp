#include "r2l/common/checkpoint.hpp"

#include <string>

#include "r2l/common/binary_io.hpp"
#include "r2l/common/error.hpp"

namespace r2l {

namespace {
constexpr char kMagic[4] = {'R', '2', 'L', 'C'};
}

std::vector<std::byte> serialize(const Checkpoint& cp) {
  ByteWriter w;
  w.put_bytes(std::string_view(kMagic, 4));
  w.put<std::uint32_t>(Checkpoint::kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cp.kind));
  const std::string config = cp.config.dump();
  w.put<std::uint64_t>(config.size());
  w.put_bytes(config);
  w.put<std::uint8_t>(cp.encoder.has_value() ? 1 : 0);
  if (cp.encoder) {
    w.put<std::uint32_t>(cp.encoder->kind);
    w.put<std::uint32_t>(cp.encoder->points);
    w.put<std::uint32_t>(cp.encoder->octaves);
    w.put<std::uint8_t>(cp.encoder->include_raw ? 1 : 0);
    w.put<std::uint8_t>(cp.encoder->mode);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cp.layers.size()));
  for (const auto& l : cp.layers) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(l.activation));
    w.put<std::uint64_t>(static_cast<std::uint64_t>(l.weight.rows()));
    w.put<std::uint64_t>(static_cast<std::uint64_t>(l.weight.cols()));
    w.put_array(std::span<const float>(l.weight.data(), static_cast<std::size_t>(l.weight.size())));
    w.put_array(std::span<const float>(l.bias.data(), static_cast<std::size_t>(l.bias.size())));
  }
  const std::uint32_t crc = crc32(w.bytes());
  w.put<std::uint32_t>(crc);
  return w.release();
}

Checkpoint parse_checkpoint(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 + 4) throw FormatError("checkpoint: file too short");
  ByteReader r(bytes);
  const auto magic = r.get_bytes(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != Checkpoint::kVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  const std::uint32_t stored_crc = [&] {
    ByteReader tail(bytes.subspan(bytes.size() - 4));
    return tail.get<std::uint32_t>();
  }();
  if (crc32(bytes.first(bytes.size() - 4)) != stored_crc) throw FormatError("checkpoint: checksum mismatch");

  Checkpoint cp;
  const auto kind = r.get<std::uint32_t>();
  if (kind != 1 && kind != 2) throw FormatError("checkpoint: unknown model kind");
  cp.kind = static_cast<ModelKind>(kind);
  const auto config_len = r.get<std::uint64_t>();
  const auto config_bytes = r.get_bytes(config_len);
  try {
    cp.config = nlohmann::json::parse(reinterpret_cast<const char*>(config_bytes.data()),
                                      reinterpret_cast<const char*>(config_bytes.data()) + config_bytes.size());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: bad config echo: ") + e.what());
  }
  if (r.get<std::uint8_t>() != 0) {
    EncoderSection e;
    e.kind = r.get<std::uint32_t>();
    e.points = r.get<std::uint32_t>();
    e.octaves = r.get<std::uint32_t>();
    e.include_raw = r.get<std::uint8_t>() != 0;
    e.mode = r.get<std::uint8_t>();
    cp.encoder = e;
  }
  const auto layer_count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const auto act = r.get<std::uint32_t>();
    if (act > static_cast<std::uint32_t>(tensor::Activation::softplus)) throw FormatError("checkpoint: bad activation");
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    if (rows == 0 || cols == 0 || rows * cols > r.remaining() / sizeof(float)) {
      throw FormatError("checkpoint: bad layer shape");
    }
    tensor::DenseLayer<float> l(static_cast<tensor::Index>(cols), static_cast<tensor::Index>(rows),
                                static_cast<tensor::Activation>(act));
    r.get_array(std::span<float>(l.weight.data(), static_cast<std::size_t>(l.weight.size())));
    r.get_array(std::span<float>(l.bias.data(), static_cast<std::size_t>(l.bias.size())));
    cp.layers.push_back(std::move(l));
  }
  if (r.remaining() != 4) throw FormatError("checkpoint: trailing bytes");
  return cp;
}

Sha256 save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const auto bytes = serialize(checkpoint);
  write_file(path, bytes);
  return sha256(bytes);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return {parse_checkpoint(bytes), sha256(bytes)};
}

}  // namespace r2l
