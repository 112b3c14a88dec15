#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mmw::rs {

inline constexpr std::size_t kCodeLength = 255;
inline constexpr std::size_t kMessageLength = 239;
inline constexpr std::size_t kParityLength = kCodeLength - kMessageLength;
inline constexpr std::size_t kMaxCorrectable = kParityLength / 2;

using Message = std::array<std::uint8_t, kMessageLength>;
using Parity = std::array<std::uint8_t, kParityLength>;
using Codeword = std::array<std::uint8_t, kCodeLength>;
using Syndromes = std::array<std::uint8_t, kParityLength>;

/// Systematic RS(255,239) code block: codeword = message || parity.
/// Byte 0 of the codeword is the coefficient of x^254.
struct CodeBlock {
    Message message{};
    Parity parity{};

    Codeword codeword() const;
};

/// Generator polynomial prod_{i=0}^{15} (x - alpha^i), highest degree first (monic, 17 coefficients).
const std::array<std::uint8_t, kParityLength + 1>& generator();

/// Throws std::invalid_argument unless message.size() == 239.
Parity rs_encode(std::span<const std::uint8_t> message);

CodeBlock encode_block(std::span<const std::uint8_t> message);

/// S_i = c(alpha^i), i = 0..15.
Syndromes syndromes(std::span<const std::uint8_t> codeword);

enum class DecodeStatus { ok, failure };

struct DecodeResult {
    DecodeStatus status = DecodeStatus::failure;
    Message message{};
    int corrected = 0;
    /// Nonzero syndromes of the received word; diagnostics for failures.
    int nonzero_syndromes = 0;
    std::string reason;

    bool ok() const { return status == DecodeStatus::ok; }
};

/// Syndrome -> Berlekamp-Massey -> Chien -> Forney.
/// Uncorrectable words return status failure; a word closer to some other
/// codeword decodes to that codeword (miscorrection), as for any bounded-distance decoder.
DecodeResult rs_decode(std::span<const std::uint8_t> received);

}  // namespace mmw::rs
