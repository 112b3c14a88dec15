#include "mmw/pn.hpp"

#include <algorithm>
#include <stdexcept>

namespace mmw {

Bits unpack_bits(std::span<const std::uint8_t> bytes) {
    Bits out;
    out.reserve(bytes.size() * 8);
    for (std::uint8_t b : bytes)
        for (int k = 7; k >= 0; --k) out.push_back(static_cast<std::uint8_t>((b >> k) & 1u));
    return out;
}

Bytes pack_bits(std::span<const std::uint8_t> bits) {
    if (bits.size() % 8 != 0) throw std::invalid_argument("pack_bits: length is not a multiple of 8");
    Bytes out(bits.size() / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        out[i / 8] = static_cast<std::uint8_t>(out[i / 8] | ((bits[i] & 1u) << (7 - i % 8)));
    return out;
}

}  // namespace mmw

namespace mmw::pn {

LfsrSpec pn31_spec() { return {5, {2}, 0x1F}; }
LfsrSpec pn63_spec() { return {6, {5}, 0x3F}; }

Bits lfsr_run(const LfsrSpec& spec, std::size_t n) {
    if (spec.order < 2 || spec.order > 31) throw std::invalid_argument("lfsr_run: order out of range");
    const std::uint32_t mask = (1u << spec.order) - 1u;
    if ((spec.seed & mask) == 0) throw std::invalid_argument("lfsr_run: seed must be nonzero");
    std::uint32_t feedback_mask = 1u;  // constant term taps s[k]
    for (int t : spec.taps) {
        if (t <= 0 || t >= spec.order) throw std::invalid_argument("lfsr_run: tap outside (0, order)");
        feedback_mask |= 1u << t;
    }

    std::uint32_t reg = spec.seed & mask;
    Bits out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<std::uint8_t>(reg & 1u);
        const auto next = static_cast<std::uint32_t>(__builtin_parity(reg & feedback_mask));
        reg = (reg >> 1) | (next << (spec.order - 1));
    }
    return out;
}

std::size_t measured_period(std::span<const std::uint8_t> bits) {
    for (std::size_t p = 1; p <= bits.size() / 2; ++p) {
        bool periodic = true;
        for (std::size_t i = 0; i + p < bits.size() && periodic; ++i) periodic = bits[i] == bits[i + p];
        if (periodic) return p;
    }
    return 0;
}

std::array<std::uint8_t, 4> PreambleWord::bytes() const {
    const Bytes b = pack_bits(bits);
    return {b[0], b[1], b[2], b[3]};
}

std::uint32_t PreambleWord::as_u32() const {
    std::uint32_t v = 0;
    for (std::uint8_t b : bits) v = (v << 1) | b;
    return v;
}

std::array<std::uint8_t, 8> ScramblerWord::bytes() const {
    const Bytes b = pack_bits(bits);
    std::array<std::uint8_t, 8> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

const PreambleWord& preamble_word() {
    static const PreambleWord w = [] {
        PreambleWord p;
        const Bits seq = lfsr_run(pn31_spec(), 31);
        std::copy(seq.begin(), seq.end(), p.bits.begin());
        p.bits[31] = 0;
        return p;
    }();
    return w;
}

const ScramblerWord& scrambler_word() {
    static const ScramblerWord w = [] {
        ScramblerWord s;
        const Bits seq = lfsr_run(pn63_spec(), 63);
        std::copy(seq.begin(), seq.end(), s.bits.begin());
        s.bits[63] = 0;
        return s;
    }();
    return w;
}

Bytes scramble(std::span<const std::uint8_t> data, const ScramblerWord& word, std::size_t start_offset) {
    const auto key = word.bytes();
    Bytes out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i] ^ key[(start_offset + i) % key.size()];
    return out;
}

int preamble_scrambler_crosscorr(const PreambleWord& preamble, const ScramblerWord& scrambler) {
    int best = 0;
    for (std::size_t offset = 0; offset < scrambler.bits.size(); ++offset) {
        int matches = 0;
        for (std::size_t i = 0; i < preamble.bits.size(); ++i)
            matches += scrambler.bits[(offset + i) % scrambler.bits.size()] == preamble.bits[i];
        best = std::max(best, matches);
    }
    return best;
}

std::size_t longest_run(std::span<const std::uint8_t> bits) {
    std::size_t best = 0, run = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        run = (i > 0 && bits[i] == bits[i - 1]) ? run + 1 : 1;
        best = std::max(best, run);
    }
    return best;
}

}  // namespace mmw::pn
