#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmw/bits.hpp"

namespace mmw::pn {

/// Fibonacci LFSR for the polynomial x^order + sum_{t in taps, t < order} x^t + 1.
/// The register holds the next `order` output bits; seed bit i is output i.
struct LfsrSpec {
    int order = 0;
    std::vector<int> taps;  // exponents of the feedback polynomial, excluding the constant term
    std::uint32_t seed = 0;  // bit i = initial output i; must be nonzero

    std::size_t period() const { return (std::size_t{1} << order) - 1; }
};

/// x^5 + x^2 + 1, all-ones seed.
LfsrSpec pn31_spec();
/// x^6 + x^5 + 1, all-ones seed.
LfsrSpec pn63_spec();

/// Throws std::invalid_argument on a zero seed or malformed taps.
Bits lfsr_run(const LfsrSpec& spec, std::size_t n);

/// Smallest p > 0 with bits[i] == bits[i + p] for the whole sequence, or 0 if none within bits.size()/2.
std::size_t measured_period(std::span<const std::uint8_t> bits);

/// 31-bit PN period followed by one 0 pad bit.
struct PreambleWord {
    std::array<std::uint8_t, 32> bits{};
    std::array<std::uint8_t, 4> bytes() const;
    std::uint32_t as_u32() const;  // bit 0 of the word in the MSB
};

/// 63-bit PN period followed by one 0 pad bit.
struct ScramblerWord {
    std::array<std::uint8_t, 64> bits{};
    std::array<std::uint8_t, 8> bytes() const;
};

const PreambleWord& preamble_word();
const ScramblerWord& scrambler_word();

/// out[i] = data[i] ^ word[(start_offset + i) % 8].
Bytes scramble(std::span<const std::uint8_t> data, const ScramblerWord& word, std::size_t start_offset = 0);

/// Maximum, over the 64 cyclic 32-bit windows of the repeated scrambler word, of bit agreements with the preamble.
int preamble_scrambler_crosscorr(const PreambleWord& preamble = preamble_word(),
                                 const ScramblerWord& scrambler = scrambler_word());

/// Longest run of identical consecutive bits.
std::size_t longest_run(std::span<const std::uint8_t> bits);

}  // namespace mmw::pn
