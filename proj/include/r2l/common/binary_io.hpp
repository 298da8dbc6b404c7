#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "r2l/common/error.hpp"

namespace r2l {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace detail {
template <typename T>
T byteswap_if_big(T value) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto bytes = std::bit_cast<std::array<std::byte, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return value;
  }
}
}  // namespace detail

/// Append-only little-endian byte buffer.
class ByteWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    const T le = detail::byteswap_if_big(value);
    const auto* p = reinterpret_cast<const std::byte*>(&le);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }

  void put_bytes(std::span<const std::byte> raw) { bytes_.insert(bytes_.end(), raw.begin(), raw.end()); }
  void put_bytes(std::string_view raw) {
    put_bytes(std::as_bytes(std::span(raw.data(), raw.size())));
  }

  template <typename T>
  void put_array(std::span<const T> values) {
    if constexpr (std::endian::native == std::endian::little) {
      put_bytes(std::as_bytes(values));
    } else {
      for (T v : values) put(v);
    }
  }

  std::size_t size() const { return bytes_.size(); }
  const std::vector<std::byte>& bytes() const { return bytes_; }
  std::vector<std::byte> release() { return std::move(bytes_); }

 private:
  std::vector<std::byte> bytes_;
};

/// Bounds-checked little-endian reader over a byte span.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value;
    std::memcpy(&value, take(sizeof(T)).data(), sizeof(T));
    return detail::byteswap_if_big(value);
  }

  std::span<const std::byte> get_bytes(std::size_t n) { return take(n); }

  template <typename T>
  void get_array(std::span<T> out) {
    auto raw = take(out.size_bytes());
    std::memcpy(out.data(), raw.data(), raw.size());
    if constexpr (std::endian::native == std::endian::big) {
      for (auto& v : out) v = detail::byteswap_if_big(v);
    }
  }

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }

 private:
  std::span<const std::byte> take(std::size_t n) {
    if (n > remaining()) throw FormatError("unexpected end of data");
    auto out = bytes_.subspan(offset_, n);
    offset_ += n;
    return out;
  }

  std::span<const std::byte> bytes_;
  std::size_t offset_ = 0;
};

std::vector<std::byte> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes);

}  // namespace r2l
