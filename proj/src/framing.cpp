#include "mmw/framing.hpp"

#include <algorithm>
#include <stdexcept>

#include "mmw/pn.hpp"

namespace mmw::framing {

namespace {
constexpr std::size_t kHeaderOffset = kPreambleBytes + kPayloadBytes;
constexpr std::size_t kParityOffset = kHeaderOffset + kHeaderBytes;
const Rational kRateRatio{static_cast<std::int64_t>(kPayloadBytes), static_cast<std::int64_t>(kFrameBytes)};
}  // namespace

RawFrame ByteFrame::serialize() const {
    RawFrame out{};
    std::copy(preamble.begin(), preamble.end(), out.begin());
    std::copy(payload.begin(), payload.end(), out.begin() + kPreambleBytes);
    out[kHeaderOffset] = header;
    std::copy(parity.begin(), parity.end(), out.begin() + kParityOffset);
    return out;
}

RawFrame ByteFrame::on_air() const {
    RawFrame out = serialize();
    const std::span<const std::uint8_t> body(out.data() + kPreambleBytes, kScrambledBytes);
    const Bytes scrambled = pn::scramble(body, pn::scrambler_word(), 0);
    std::copy(scrambled.begin(), scrambled.end(), out.begin() + kPreambleBytes);
    return out;
}

ByteFrame build_frame(std::span<const std::uint8_t> payload, std::uint32_t seq) {
    if (payload.size() != kPayloadBytes)
        throw std::invalid_argument("build_frame: payload must be 239 bytes, got " + std::to_string(payload.size()));
    ByteFrame f;
    f.preamble = pn::preamble_word().bytes();
    std::copy(payload.begin(), payload.end(), f.payload.begin());
    f.header = static_cast<std::uint8_t>(seq & 0xFFu);
    f.parity = rs::rs_encode(payload);
    return f;
}

ParsedFrame parse_frame(std::span<const std::uint8_t> raw, bool decode_fec) {
    if (raw.size() != kFrameBytes)
        throw std::invalid_argument("parse_frame: frame must be 260 bytes, got " + std::to_string(raw.size()));
    const Bytes clear = pn::scramble(raw.subspan(kPreambleBytes, kScrambledBytes), pn::scrambler_word(), 0);

    ParsedFrame out;
    out.header = clear[kPayloadBytes];
    if (!decode_fec) {
        std::copy_n(clear.begin(), kPayloadBytes, out.payload.begin());
        out.ok = true;
        return out;
    }

    rs::Codeword cw{};
    std::copy_n(clear.begin(), kPayloadBytes, cw.begin());
    std::copy_n(clear.begin() + kPayloadBytes + kHeaderBytes, kParityBytes, cw.begin() + kPayloadBytes);
    const rs::DecodeResult dec = rs::rs_decode(cw);
    if (!dec.ok()) {
        std::copy_n(clear.begin(), kPayloadBytes, out.payload.begin());
        out.failed_syndromes = dec.nonzero_syndromes;
        out.error = dec.reason;
        return out;
    }
    out.ok = true;
    out.payload = dec.message;
    out.fec_corrected = dec.corrected;
    return out;
}

bool ClockPlan::valid() const {
    return gross_hz > 0 && net_hz == gross_hz * kRateRatio && gross_byte_hz == gross_hz / 8 &&
           net_byte_hz == net_hz / 8;
}

ClockPlan make_clock_plan(Rational gross_hz, Rational if_hz) {
    if (gross_hz <= 0) throw std::invalid_argument("make_clock_plan: gross rate must be positive");
    ClockPlan p;
    p.gross_hz = gross_hz;
    p.net_hz = gross_hz * kRateRatio;
    p.gross_byte_hz = gross_hz / 8;
    p.net_byte_hz = p.net_hz / 8;
    p.if_hz = if_hz;
    return p;
}

Rational net_rate(const ClockPlan& plan) { return plan.gross_hz * kRateRatio; }

}  // namespace mmw::framing
