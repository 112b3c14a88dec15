#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mmw {

/// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;
using Bytes = std::vector<std::uint8_t>;

/// MSB-first unpacking; the artifact-wide bit order.
Bits unpack_bits(std::span<const std::uint8_t> bytes);

/// MSB-first packing. bits.size() must be a multiple of 8.
Bytes pack_bits(std::span<const std::uint8_t> bits);

}  // namespace mmw
