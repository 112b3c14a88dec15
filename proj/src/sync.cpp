#include "mmw/sync.hpp"

#include <algorithm>
#include <stdexcept>

namespace mmw::sync {

namespace {

constexpr std::uint64_t kFrameBits = framing::kFrameBits;
constexpr std::size_t kFrameBytes = framing::kFrameBytes;

std::uint32_t pack32(std::span<const std::uint8_t> bits) {
    std::uint32_t w = 0;
    for (int i = 0; i < kCorrelatorBits; ++i) w = (w << 1) | (bits[static_cast<std::size_t>(i)] & 1u);
    return w;
}

}  // namespace

int correlate32(std::span<const std::uint8_t> window, const pn::PreambleWord& reference) {
    if (window.size() != kCorrelatorBits) throw std::invalid_argument("correlate32: window must be 32 bits");
    return correlate32(pack32(window), reference.as_u32());
}

std::array<CorrelatorScore, kBankSize> bank_scan(std::span<const std::uint8_t> bits, std::size_t byte_position,
                                                 const pn::PreambleWord& reference) {
    if (bits.size() != kBankWindowBits) throw std::invalid_argument("bank_scan: window must be 39 bits");
    std::array<CorrelatorScore, kBankSize> out{};
    const std::uint32_t ref = reference.as_u32();
    for (int s = 0; s < kBankSize; ++s)
        out[static_cast<std::size_t>(s)] = {byte_position, s, correlate32(pack32(bits.subspan(static_cast<std::size_t>(s), kCorrelatorBits)), ref)};
    return out;
}

std::vector<SyncCandidate> detect(std::span<const std::uint8_t> bits, int threshold) {
    if (threshold <= 0 || threshold > kCorrelatorBits) throw std::invalid_argument("detect: threshold must be in (0, 32]");
    std::vector<SyncCandidate> out;
    if (bits.size() < static_cast<std::size_t>(kCorrelatorBits)) return out;
    const std::uint32_t ref = pn::preamble_word().as_u32();
    std::uint32_t w = pack32(bits.first(kCorrelatorBits));
    for (std::size_t start = 0;; ++start) {
        const int score = correlate32(w, ref);
        if (score >= threshold) out.push_back({start, start / 8, static_cast<int>(start % 8), score});
        const std::size_t next = start + kCorrelatorBits;
        if (next >= bits.size()) break;
        w = (w << 1) | (bits[next] & 1u);
    }
    return out;
}

std::vector<SyncCandidate> best_per_window(std::span<const SyncCandidate> candidates) {
    std::vector<SyncCandidate> out;
    for (const auto& c : candidates) {
        if (!out.empty() && out.back().byte_position == c.byte_position) {
            auto& best = out.back();
            if (c.score > best.score || (c.score == best.score && c.shift < best.shift)) best = c;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::optional<SyncDecision> validate_periodicity(std::span<const SyncCandidate> candidates,
                                                 std::span<const std::uint8_t> bits) {
    const std::vector<SyncCandidate> best = best_per_window(candidates);
    for (const auto& c : best) {
        if (c.bit_index + kFrameBits + kCorrelatorBits > bits.size()) break;
        const std::size_t target = c.byte_position + kFrameBytes;
        const auto it = std::lower_bound(best.begin(), best.end(), target,
                                         [](const SyncCandidate& x, std::size_t pos) { return x.byte_position < pos; });
        if (it != best.end() && it->byte_position == target && it->shift == c.shift)
            return SyncDecision{c.bit_index, c.shift, c.shift, true};
    }
    return std::nullopt;
}

DescrambleResult descramble_align(std::span<const std::uint8_t> frame_body, const pn::ScramblerWord& word,
                                  std::span<const std::uint8_t> expected_clear) {
    if (frame_body.size() != framing::kScrambledBytes)
        throw std::invalid_argument("descramble_align: expected 256 post-preamble bytes");
    if (!expected_clear.empty() && expected_clear.size() != 8)
        throw std::invalid_argument("descramble_align: expected_clear must be 8 bytes");
    DescrambleResult r;
    r.bytes = pn::scramble(frame_body, word, 0);
    const auto key = word.bytes();
    for (std::size_t i = 0; i < 8; ++i) {
        const std::uint8_t expected = static_cast<std::uint8_t>(key[i] ^ (expected_clear.empty() ? 0 : expected_clear[i]));
        r.verification += 8 - __builtin_popcount(static_cast<unsigned>(frame_body[i] ^ expected));
    }
    return r;
}

FrameSynchronizer::FrameSynchronizer(SyncConfig cfg) : cfg_(cfg), reference_(pn::preamble_word().as_u32()) {
    if (cfg_.threshold <= 0 || cfg_.threshold > kCorrelatorBits)
        throw std::invalid_argument("FrameSynchronizer: threshold must be in (0, 32]");
    if (cfg_.miss_limit < 1) throw std::invalid_argument("FrameSynchronizer: miss_limit must be >= 1");
}

std::uint32_t FrameSynchronizer::word_at(std::uint64_t abs_bit) const {
    return pack32(std::span<const std::uint8_t>(buf_).subspan(abs_bit - origin_, kCorrelatorBits));
}

std::optional<SyncCandidate> FrameSynchronizer::best_in_window(std::uint64_t abs_byte_start) const {
    const std::size_t off = abs_byte_start - origin_;
    std::uint64_t w = 0;
    for (std::size_t i = 0; i < kBankWindowBits; ++i) w = (w << 1) | (buf_[off + i] & 1u);
    std::optional<SyncCandidate> best;
    for (int s = 0; s < kBankSize; ++s) {
        const auto word = static_cast<std::uint32_t>(w >> (kBankSize - 1 - s));
        const int score = correlate32(word, reference_);
        if (score >= cfg_.threshold && (!best || score > best->score))
            best = SyncCandidate{abs_byte_start + static_cast<std::uint64_t>(s), abs_byte_start / 8, s, score};
    }
    return best;
}

void FrameSynchronizer::emit(std::uint64_t start, int score, bool flywheel, std::vector<SyncedFrame>& out) {
    SyncedFrame f;
    f.start_bit = start;
    f.preamble_score = score;
    f.flywheel = flywheel;
    const Bytes packed = pack_bits(std::span<const std::uint8_t>(buf_).subspan(start - origin_, kFrameBits));
    std::copy(packed.begin(), packed.end(), f.bytes.begin());
    out.push_back(f);
    ++stats_.frames;
    if (flywheel) ++stats_.flywheel_frames;
}

void FrameSynchronizer::trim() {
    const std::uint64_t keep_from = locked_ ? expected_ : search_pos_;
    const std::uint64_t drop = keep_from - origin_;
    if (drop < (std::uint64_t{1} << 16)) return;
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(drop));
    origin_ += drop;
}

void FrameSynchronizer::push(std::span<const std::uint8_t> bits, std::vector<SyncedFrame>& out) {
    buf_.insert(buf_.end(), bits.begin(), bits.end());

    for (;;) {
        if (!locked_) {
            if (!available(search_pos_ + kBankWindowBits)) break;
            const auto cand = best_in_window(search_pos_);
            if (!cand) {
                search_pos_ += 8;
                continue;
            }
            // Periodicity check needs the bank window one frame later.
            if (!available(search_pos_ + kFrameBits + kBankWindowBits)) break;
            ++stats_.candidates;
            const auto second = best_in_window(search_pos_ + kFrameBits);
            const bool validated = second && second->shift == cand->shift;
            if (cfg_.record_log) log_.push_back({cand->bit_index, cand->shift, cand->score, validated});
            if (!validated) {
                ++stats_.rejected_candidates;
                search_pos_ += 8;
                continue;
            }
            ++stats_.validations;
            locked_ = true;
            misses_ = 0;
            expected_ = cand->bit_index;
            pending_emit_ = true;
            pending_score_ = cand->score;
            pending_flywheel_ = false;
        }

        if (pending_emit_) {
            if (!available(expected_ + kFrameBits)) break;
            emit(expected_, pending_score_, pending_flywheel_, out);
            expected_ += kFrameBits;
            pending_emit_ = false;
            continue;
        }

        if (!available(expected_ + kCorrelatorBits)) break;
        const int score = correlate32(word_at(expected_), reference_);
        if (cfg_.record_log) log_.push_back({expected_, static_cast<int>(expected_ % 8), score, true});
        if (score >= cfg_.threshold) {
            misses_ = 0;
            pending_flywheel_ = false;
        } else if (++misses_ >= cfg_.miss_limit) {
            locked_ = false;
            ++stats_.lock_losses;
            search_pos_ = expected_ - expected_ % 8;
            continue;
        } else {
            pending_flywheel_ = true;
        }
        pending_emit_ = true;
        pending_score_ = score;
    }
    trim();
}

}  // namespace mmw::sync
