#include <stdexcept>
#include <doctest.h>

#include <random>

#include "mmw/framing.hpp"
#include "mmw/sync.hpp"

using namespace mmw;
using namespace mmw::sync;

namespace {

void append_random(Bits& out, std::size_t n, std::mt19937_64& rng) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(rng() & 1u));
}

Bits preamble_bits() {
    const auto& p = pn::preamble_word().bits;
    return Bits(p.begin(), p.end());
}

struct Stream {
    Bits bits;
    std::vector<std::uint64_t> starts;
    std::vector<framing::RawFrame> frames;
};

Stream make_stream(std::size_t lead_in, std::size_t n_frames, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Stream s;
    append_random(s.bits, lead_in, rng);
    for (std::size_t f = 0; f < n_frames; ++f) {
        framing::Payload p{};
        for (auto& b : p) b = static_cast<std::uint8_t>(rng());
        s.starts.push_back(s.bits.size());
        s.frames.push_back(framing::build_frame(p, static_cast<std::uint32_t>(f)).on_air());
        const Bits fb = unpack_bits(s.frames.back());
        s.bits.insert(s.bits.end(), fb.begin(), fb.end());
    }
    append_random(s.bits, 100, rng);
    return s;
}

}  // namespace

TEST_CASE("correlator scores") {
    Bits w = preamble_bits();
    CHECK(correlate32(w) == 32);
    for (auto& b : w) b ^= 1u;
    CHECK(correlate32(w) == 0);
    w = preamble_bits();
    w[0] ^= 1u;
    w[10] ^= 1u;
    w[31] ^= 1u;
    CHECK(correlate32(w) == 29);
    CHECK(correlate32(0xF8DD4258u, 0xF8DD4258u) == 32);
    CHECK(correlate32(0u, 0xFFFFFFFFu) == 0);
    CHECK_THROWS_AS(correlate32(Bits(31, 0)), std::invalid_argument);
}

TEST_CASE("bank scan finds the shift") {
    std::mt19937_64 rng(1);
    for (int shift = 0; shift < 8; ++shift) {
        Bits window;
        append_random(window, static_cast<std::size_t>(shift), rng);
        const Bits p = preamble_bits();
        window.insert(window.end(), p.begin(), p.end());
        append_random(window, static_cast<std::size_t>(7 - shift), rng);
        const auto scores = bank_scan(window, 12);
        CHECK(scores[static_cast<std::size_t>(shift)].score == 32);
        CHECK(scores[static_cast<std::size_t>(shift)].byte_position == 12);
    }
    CHECK_THROWS_AS(bank_scan(Bits(38, 0)), std::invalid_argument);
}

TEST_CASE("detect reports position, byte grid and shift") {
    std::mt19937_64 rng(2);
    Bits s;
    append_random(s, 101, rng);
    const Bits p = preamble_bits();
    s.insert(s.end(), p.begin(), p.end());
    append_random(s, 50, rng);
    const auto c = detect(s);
    bool found = false;
    for (const auto& x : c)
        if (x.bit_index == 101) {
            found = true;
            CHECK(x.byte_position == 12);
            CHECK(x.shift == 5);
            CHECK(x.score == 32);
        }
    CHECK(found);
    CHECK_THROWS_AS(detect(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(detect(s, 33), std::invalid_argument);
}

TEST_CASE("best per window keeps the highest score and the smallest shift on ties") {
    const std::vector<SyncCandidate> c{{80, 10, 0, 29}, {82, 10, 2, 31}, {85, 10, 5, 31}, {96, 12, 0, 30}};
    const auto b = best_per_window(c);
    REQUIRE(b.size() == 2);
    CHECK(b[0].shift == 2);
    CHECK(b[1].byte_position == 12);
}

TEST_CASE("periodicity validation") {
    const Stream s = make_stream(203, 3, 3);
    const auto d = validate_periodicity(detect(s.bits), s.bits);
    REQUIRE(d.has_value());
    CHECK(d->frame_start_bit == 203);
    CHECK(d->shift == 203 % 8);
    CHECK(d->validated);

    // Two preambles one bit further apart than a frame never validate.
    std::mt19937_64 rng(4);
    for (std::size_t gap : {framing::kFrameBits + 1, framing::kFrameBits - 1, framing::kFrameBits + 8}) {
        Bits b;
        append_random(b, 40, rng);
        const Bits p = preamble_bits();
        b.insert(b.end(), p.begin(), p.end());
        append_random(b, gap - 32, rng);
        b.insert(b.end(), p.begin(), p.end());
        append_random(b, 200, rng);
        CAPTURE(gap);
        CHECK_FALSE(validate_periodicity(detect(b), b).has_value());
    }
}

TEST_CASE("descramble diagnostics") {
    const framing::Payload zeros{};
    const auto air = framing::build_frame(zeros, 0).on_air();
    const std::span<const std::uint8_t> body(air.data() + 4, framing::kScrambledBytes);
    const auto r = descramble_align(body);
    CHECK(r.verification == 64);
    CHECK(std::all_of(r.bytes.begin(), r.bytes.end(), [](auto v) { return v == 0; }));

    std::mt19937_64 rng(5);
    framing::Payload p{};
    for (auto& b : p) b = static_cast<std::uint8_t>(rng());
    const auto air2 = framing::build_frame(p, 1).on_air();
    const std::span<const std::uint8_t> body2(air2.data() + 4, framing::kScrambledBytes);
    CHECK(descramble_align(body2, pn::scrambler_word(), std::span(p).first(8)).verification == 64);
    CHECK(descramble_align(body2).verification < 64);
    CHECK_THROWS_AS(descramble_align(std::span(p).first(200)), std::invalid_argument);
}

TEST_CASE("synchronizer acquires from any offset and recovers every frame") {
    for (std::size_t lead : {0u, 1u, 7u, 333u, 2079u}) {
        const Stream s = make_stream(lead, 12, 10 + lead);
        FrameSynchronizer sync;
        std::vector<SyncedFrame> out;
        sync.push(s.bits, out);
        CAPTURE(lead);
        REQUIRE(out.size() == s.frames.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(out[i].start_bit == s.starts[i]);
            CHECK(out[i].bytes == s.frames[i]);
            CHECK_FALSE(out[i].flywheel);
        }
        CHECK(sync.stats().validations == 1);
    }
}

TEST_CASE("chunked pushes give the same frames as one push") {
    const Stream s = make_stream(911, 20, 20);
    FrameSynchronizer whole;
    std::vector<SyncedFrame> a;
    whole.push(s.bits, a);

    std::mt19937_64 rng(21);
    FrameSynchronizer pieces;
    std::vector<SyncedFrame> b;
    for (std::size_t pos = 0; pos < s.bits.size();) {
        const std::size_t n = std::min<std::size_t>(1 + rng() % 3000, s.bits.size() - pos);
        pieces.push(std::span(s.bits).subspan(pos, n), b);
        pos += n;
    }
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].start_bit == b[i].start_bit);
        CHECK(a[i].bytes == b[i].bytes);
    }
}

TEST_CASE("flywheel holds lock through one damaged preamble and drops after two") {
    Stream s = make_stream(50, 10, 30);
    for (std::size_t i = 0; i < 8; ++i) s.bits[s.starts[4] + i] ^= 1u;  // score 24
    FrameSynchronizer sync;
    std::vector<SyncedFrame> out;
    sync.push(s.bits, out);
    REQUIRE(out.size() == 10);
    CHECK(out[4].flywheel);
    CHECK(out[4].start_bit == s.starts[4]);
    CHECK(sync.stats().lock_losses == 0);

    Stream t = make_stream(50, 10, 31);
    for (int f : {4, 5})
        for (std::size_t i = 0; i < 8; ++i) t.bits[t.starts[static_cast<std::size_t>(f)] + i] ^= 1u;
    FrameSynchronizer sync2;
    std::vector<SyncedFrame> out2;
    sync2.push(t.bits, out2);
    CHECK(sync2.stats().lock_losses == 1);
    // Frame 4 rides the flywheel; frame 5 is the second miss; search re-acquires at frame 6.
    std::vector<std::uint64_t> starts;
    for (const auto& f : out2) starts.push_back(f.start_bit);
    CHECK(std::find(starts.begin(), starts.end(), t.starts[4]) != starts.end());
    CHECK(std::find(starts.begin(), starts.end(), t.starts[6]) != starts.end());
    CHECK(std::find(starts.begin(), starts.end(), t.starts[9]) != starts.end());
}

TEST_CASE("random data produces no frames") {
    std::mt19937_64 rng(40);
    Bits noise;
    append_random(noise, 2'000'000, rng);
    FrameSynchronizer sync;
    std::vector<SyncedFrame> out;
    sync.push(noise, out);
    CHECK(out.empty());
    CHECK(sync.stats().validations == 0);
    CHECK(sync.stats().candidates > 0);
}

TEST_CASE("invalid synchronizer settings") {
    CHECK_THROWS_AS(FrameSynchronizer(SyncConfig{0, 2, false}), std::invalid_argument);
    CHECK_THROWS_AS(FrameSynchronizer(SyncConfig{29, 0, false}), std::invalid_argument);
}
