#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mmw/bits.hpp"
#include "mmw/framing.hpp"
#include "mmw/pn.hpp"

namespace mmw::sync {

inline constexpr int kCorrelatorBits = 32;
inline constexpr int kBankSize = 8;
inline constexpr std::size_t kBankWindowBits = kCorrelatorBits + kBankSize - 1;  // 39
inline constexpr int kDefaultThreshold = 29;

/// Agreeing bit positions between a 32-bit window and the preamble.
int correlate32(std::span<const std::uint8_t> window, const pn::PreambleWord& reference = pn::preamble_word());

/// Same, on packed words (first bit in the MSB).
inline int correlate32(std::uint32_t window, std::uint32_t reference) {
    return 32 - __builtin_popcount(window ^ reference);
}

struct CorrelatorScore {
    std::size_t byte_position = 0;
    int shift = 0;  // correlator index; window starts at bit 8*byte_position + shift
    int score = 0;
};

/// score[s] = correlate32(bits[s, s+32)), s = 0..7. Needs exactly 39 bits.
std::array<CorrelatorScore, kBankSize> bank_scan(std::span<const std::uint8_t> bits, std::size_t byte_position = 0,
                                                 const pn::PreambleWord& reference = pn::preamble_word());

struct SyncCandidate {
    std::size_t bit_index = 0;  // = 8*byte_position + shift
    std::size_t byte_position = 0;
    int shift = 0;
    int score = 0;
};

/// Every (byte_position, shift) with score >= threshold, scanning the receiver byte grid
/// of the stream from bit 0. Throws for threshold outside (0, 32].
std::vector<SyncCandidate> detect(std::span<const std::uint8_t> bits, int threshold = kDefaultThreshold);

/// Keeps one candidate per byte position: highest score, ties to the smallest shift.
std::vector<SyncCandidate> best_per_window(std::span<const SyncCandidate> candidates);

struct SyncDecision {
    std::size_t frame_start_bit = 0;
    int shift = 0;
    int correlator_id = 0;
    bool validated = false;
};

/// First candidate confirmed by a second one exactly one frame (2080 bits) later with the same
/// correlator. Candidates are reduced with best_per_window first.
std::optional<SyncDecision> validate_periodicity(std::span<const SyncCandidate> candidates,
                                                 std::span<const std::uint8_t> bits);

struct DescrambleResult {
    Bytes bytes;            // 256 descrambled bytes
    int verification = 0;   // agreeing bits among the first 64 (0..64)
};

/// Descrambles the 256 post-preamble bytes at offset 0. The verification correlation
/// compares the first 64 received bits with the expected on-air bits for `expected_clear`
/// (8 bytes; all-zero when omitted, i.e. the scrambler word itself).
DescrambleResult descramble_align(std::span<const std::uint8_t> frame_body, const pn::ScramblerWord& word = pn::scrambler_word(),
                                  std::span<const std::uint8_t> expected_clear = {});

struct SyncConfig {
    int threshold = kDefaultThreshold;
    int miss_limit = 2;        // consecutive sub-threshold preambles before the lock drops
    bool record_log = false;
};

struct SyncedFrame {
    std::uint64_t start_bit = 0;  // absolute position of the preamble in the pushed stream
    framing::RawFrame bytes{};
    int preamble_score = 0;
    bool flywheel = false;        // emitted on a held lock with a sub-threshold preamble
};

struct DetectionRecord {
    std::uint64_t bit_position = 0;
    int shift = 0;
    int score = 0;
    bool validated = false;
};

struct SyncStats {
    std::uint64_t candidates = 0;
    std::uint64_t validations = 0;
    std::uint64_t rejected_candidates = 0;
    std::uint64_t lock_losses = 0;
    std::uint64_t frames = 0;
    std::uint64_t flywheel_frames = 0;
};

/// Streaming acquisition and tracking: search with the correlator bank, validate by
/// periodicity, then hold the lock and re-check each expected preamble.
class FrameSynchronizer {
public:
    explicit FrameSynchronizer(SyncConfig cfg = {});

    /// Consumes more bits and appends every frame that became complete.
    void push(std::span<const std::uint8_t> bits, std::vector<SyncedFrame>& out);

    bool locked() const { return locked_; }
    const SyncStats& stats() const { return stats_; }
    const std::vector<DetectionRecord>& log() const { return log_; }

private:
    bool available(std::uint64_t abs_end) const { return abs_end <= origin_ + buf_.size(); }
    std::uint32_t word_at(std::uint64_t abs_bit) const;
    std::optional<SyncCandidate> best_in_window(std::uint64_t abs_byte_start) const;
    void emit(std::uint64_t start, int score, bool flywheel, std::vector<SyncedFrame>& out);
    void trim();

    SyncConfig cfg_;
    std::uint32_t reference_;
    Bits buf_;
    std::uint64_t origin_ = 0;     // absolute index of buf_[0]
    bool locked_ = false;
    std::uint64_t search_pos_ = 0; // next byte-grid bit position to scan (multiple of 8)
    std::uint64_t expected_ = 0;   // next expected frame start while locked
    int misses_ = 0;
    bool pending_emit_ = false;    // frame at expected_ passed its check and waits for data
    int pending_score_ = 0;
    bool pending_flywheel_ = false;
    SyncStats stats_;
    std::vector<DetectionRecord> log_;
};

}  // namespace mmw::sync
