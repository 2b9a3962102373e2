#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace medchain {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(const std::string& data);

std::string hex_encode(std::span<const std::uint8_t> data);

}  // namespace medchain
