#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace r2l {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::span<const std::byte> bytes);
std::string to_hex(const Sha256& digest);

std::uint32_t crc32(std::span<const std::byte> bytes);

}  // namespace r2l
