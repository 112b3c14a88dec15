#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include <boost/rational.hpp>

#include "mmw/bits.hpp"
#include "mmw/reed_solomon.hpp"

namespace mmw::framing {

inline constexpr std::size_t kPreambleBytes = 4;
inline constexpr std::size_t kPayloadBytes = rs::kMessageLength;  // 239
inline constexpr std::size_t kHeaderBytes = 1;
inline constexpr std::size_t kParityBytes = rs::kParityLength;  // 16
inline constexpr std::size_t kFrameBytes = kPreambleBytes + kPayloadBytes + kHeaderBytes + kParityBytes;
inline constexpr std::size_t kScrambledBytes = kFrameBytes - kPreambleBytes;  // 256, a multiple of 8
inline constexpr std::size_t kFrameBits = kFrameBytes * 8;

static_assert(kFrameBytes == 260);
static_assert(kScrambledBytes % 8 == 0);

using Payload = rs::Message;
using RawFrame = std::array<std::uint8_t, kFrameBytes>;

/// On-air layout: preamble(4) | payload(239) | header(1) | parity(16).
/// Bytes 4..259 are scrambled at offset 0; the preamble is sent in clear.
struct ByteFrame {
    std::array<std::uint8_t, kPreambleBytes> preamble{};
    Payload payload{};
    std::uint8_t header = 0;
    rs::Parity parity{};

    /// Clear (unscrambled) serialization.
    RawFrame serialize() const;
    /// Serialization with bytes 4..259 scrambled.
    RawFrame on_air() const;
};

/// Throws std::invalid_argument unless payload.size() == 239.
ByteFrame build_frame(std::span<const std::uint8_t> payload, std::uint32_t seq);

struct ParsedFrame {
    bool ok = false;
    Payload payload{};
    std::uint8_t header = 0;
    int fec_corrected = 0;
    /// Set on failure: nonzero syndromes of the received codeword.
    int failed_syndromes = 0;
    std::string error;
};

/// Descrambles bytes 4..259 and RS-decodes payload|parity. With decode_fec false the
/// systematic payload is returned as received and ok is always true.
ParsedFrame parse_frame(std::span<const std::uint8_t> raw, bool decode_fec = true);

using Rational = boost::rational<std::int64_t>;

/// Dual-clock plan. Gross serial rate F2, net payload rate F1 = F2 * 239/260,
/// byte clocks f = F/8; the IF is metadata.
struct ClockPlan {
    Rational gross_hz{875'000'000};
    Rational net_hz{0};
    Rational gross_byte_hz{0};
    Rational net_byte_hz{0};
    Rational if_hz{3'500'000'000};

    bool valid() const;
};

/// Fills the derived rates from the gross rate.
ClockPlan make_clock_plan(Rational gross_hz, Rational if_hz = Rational{3'500'000'000});

/// F2 * 239/260, exact.
Rational net_rate(const ClockPlan& plan);

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

}  // namespace mmw::framing
