#include "mmw/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_set>
#include <utility>

#include <boost/random/normal_distribution.hpp>

#include "mmw/framing.hpp"
#include "mmw/pn.hpp"
#include "mmw/sync.hpp"

namespace mmw::harness {

namespace {

using channel::Rng;

constexpr std::uint64_t kPayloadBits = framing::kPayloadBytes * 8;
constexpr std::size_t kTailBits = 96;
constexpr std::size_t kHeaderIndex = framing::kPreambleBytes + framing::kPayloadBytes;

Rng block_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(block),
                      static_cast<std::uint32_t>(block >> 32)};
    return Rng(seq);
}

void append_random_bits(Bits& out, std::size_t n, Rng& rng) {
    for (std::size_t i = 0; i < n; i += 64) {
        const std::uint64_t w = rng();
        for (std::size_t k = 0; k < 64 && i + k < n; ++k) out.push_back(static_cast<std::uint8_t>((w >> k) & 1u));
    }
}

constexpr std::size_t kGuardBits = 8;

/// Waveform chain from transmitted bits to sliced bits (same length). The burst is padded with
/// guard symbols at both ends so filter edge transients never touch a payload decision.
Bits transmit_receive(const Bits& tx_bits, const ExperimentConfig& cfg, double ebn0_db, Rng& rng) {
    Bits padded(kGuardBits, 0);
    padded.insert(padded.end(), tx_bits.begin(), tx_bits.end());
    padded.insert(padded.end(), kGuardBits, 0);
    const Bits encoded = modem::diff_encode(padded, 0);
    modem::SampleStream s = modem::dbpsk_modulate(encoded, cfg.modem, 0);
    s = channel::tdl_apply(s, cfg.channel).stream;
    s = channel::phase_noise_apply(s, cfg.channel.phase_noise_linewidth_hz, rng);
    s = channel::awgn_apply(s, ebn0_db, 1, cfg.modem.samples_per_symbol, rng);
    s = modem::rx_filter(s, cfg.modem);
    s = modem::agc(s).stream;
    const modem::SoftStream soft = modem::delay_line_demod(s, cfg.modem);
    Bits rx = modem::slice(soft, cfg.modem);
    rx.resize(padded.size(), 0);
    return Bits(rx.begin() + kGuardBits, rx.begin() + static_cast<std::ptrdiff_t>(kGuardBits + tx_bits.size()));
}

struct TxBlock {
    Bits bits;
    std::size_t lead_in = 0;
    std::vector<framing::ByteFrame> frames;
    std::vector<framing::RawFrame> on_air;
};

TxBlock make_block(std::size_t n_frames, std::uint64_t first_seq, Rng& rng) {
    TxBlock b;
    std::uniform_int_distribution<std::size_t> lead(0, framing::kFrameBits - 1);
    b.lead_in = lead(rng);
    b.bits.reserve(b.lead_in + n_frames * framing::kFrameBits + kTailBits);
    append_random_bits(b.bits, b.lead_in, rng);
    framing::Payload payload{};
    for (std::size_t f = 0; f < n_frames; ++f) {
        for (std::size_t i = 0; i < payload.size(); i += 8) {
            const std::uint64_t w = rng();
            for (std::size_t k = 0; k < 8 && i + k < payload.size(); ++k)
                payload[i + k] = static_cast<std::uint8_t>(w >> (8 * k));
        }
        b.frames.push_back(framing::build_frame(payload, static_cast<std::uint32_t>(first_seq + f)));
        b.on_air.push_back(b.frames.back().on_air());
        const Bits fb = unpack_bits(b.on_air.back());
        b.bits.insert(b.bits.end(), fb.begin(), fb.end());
    }
    append_random_bits(b.bits, kTailBits, rng);
    return b;
}

int bit_diff(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += __builtin_popcount(static_cast<unsigned>(a[i] ^ b[i]));
    return d;
}

BerPoint simulate_block(const ExperimentConfig& cfg, double ebn0_db, std::uint64_t block) {
    Rng rng = block_rng(cfg.seed, 0, block);
    const auto n_frames = static_cast<std::size_t>(cfg.frames_per_block);
    const TxBlock tx = make_block(n_frames, block * n_frames, rng);
    const Bits rx = transmit_receive(tx.bits, cfg, ebn0_db, rng);

    BerPoint p;
    p.coding = cfg.coding;
    for (std::size_t f = 0; f < n_frames; ++f) {
        const std::size_t start = tx.lead_in + f * framing::kFrameBits;
        const Bytes raw = pack_bits(std::span<const std::uint8_t>(rx).subspan(start, framing::kFrameBits));
        const auto& sent_air = tx.on_air[f];
        const auto& sent = tx.frames[f];

        for (std::size_t i = framing::kPreambleBytes; i < framing::kFrameBytes; ++i)
            if (i != kHeaderIndex) p.codeword_byte_errors += raw[i] != sent_air[i];
        p.codeword_bytes += framing::kPayloadBytes + framing::kParityBytes;

        const framing::ParsedFrame uncoded = framing::parse_frame(raw, false);
        const int pre = bit_diff(uncoded.payload, sent.payload);
        p.bit_errors += static_cast<std::uint64_t>(pre);
        p.bits_sent += kPayloadBits;
        ++p.frames;

        if (cfg.coding) {
            const framing::ParsedFrame dec = framing::parse_frame(raw, true);
            const int post = bit_diff(dec.payload, sent.payload);
            p.post_fec_bit_errors += static_cast<std::uint64_t>(post);
            if (!dec.ok) {
                ++p.decode_failures;
                ++p.fec_hist[9];
            } else {
                ++p.fec_hist[static_cast<std::size_t>(std::clamp(dec.fec_corrected, 0, 8))];
                if (post != 0) ++p.miscorrections;
            }
            if (!dec.ok || post != 0) ++p.frame_errors;
        } else {
            p.post_fec_bit_errors += static_cast<std::uint64_t>(pre);
            if (pre != 0) ++p.frame_errors;
        }
    }

    sync::SyncConfig scfg;
    scfg.threshold = cfg.sync_threshold;
    scfg.record_log = true;
    sync::FrameSynchronizer synchronizer(scfg);
    std::vector<sync::SyncedFrame> found;
    synchronizer.push(rx, found);
    std::unordered_set<std::uint64_t> truth;
    for (std::size_t f = 0; f < n_frames; ++f) truth.insert(tx.lead_in + f * framing::kFrameBits);
    for (const auto& fr : found) {
        if (truth.count(fr.start_bit)) ++p.frames_synced;
        else ++p.false_syncs;
    }
    p.frames_missed = n_frames - std::min<std::uint64_t>(n_frames, p.frames_synced);
    return p;
}

unsigned worker_count(const ExperimentConfig& cfg) {
    if (cfg.workers > 0) return static_cast<unsigned>(cfg.workers);
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::ber_ebn0: return "ber-ebn0";
        case Mode::ber_distance: return "ber-distance";
        case Mode::eye: return "eye";
        case Mode::response: return "response";
        case Mode::frame_roundtrip: return "frame-roundtrip";
        case Mode::fifo_sim: return "fifo-sim";
    }
    return "unknown";
}

Mode mode_from_name(const std::string& name) {
    for (Mode m : {Mode::ber_ebn0, Mode::ber_distance, Mode::eye, Mode::response, Mode::frame_roundtrip, Mode::fifo_sim})
        if (name == mode_name(m)) return m;
    throw std::invalid_argument("unknown mode '" + name + "'");
}

void ExperimentConfig::validate() const {
    modem.validate();
    channel.validate();
    budget.validate();
    if (min_errors < 100) throw std::invalid_argument("min_errors must be >= 100");
    if (max_bits == 0) throw std::invalid_argument("max_bits must be positive");
    if (frames_per_block < 1) throw std::invalid_argument("frames_per_block must be >= 1");
    if (blocks_per_batch < 1) throw std::invalid_argument("blocks_per_batch must be >= 1");
    if (sync_threshold <= 0 || sync_threshold > 32) throw std::invalid_argument("sync threshold must be in (0, 32]");
    if (fifo_capacity_frames < 1) throw std::invalid_argument("fifo capacity must be at least one frame");
    if (mode == Mode::ber_distance)
        for (double d : points)
            if (!(d > 0.0)) throw std::invalid_argument("distances must be positive");
}

namespace {

// Wilson score interval at 95%; stays informative when no errors were counted.
std::pair<double, double> wilson(std::uint64_t errors, std::uint64_t n) {
    if (!n) return {0.0, 0.0};
    constexpr double z = 1.96;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(errors) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {errors ? std::max(0.0, centre - half) : 0.0, errors == n ? 1.0 : std::min(1.0, centre + half)};
}

}  // namespace

double BerPoint::ci_low() const { return wilson(bit_errors, bits_sent).first; }

double BerPoint::ci_high() const { return wilson(bit_errors, bits_sent).second; }

void BerPoint::merge(const BerPoint& o) {
    frames += o.frames;
    bits_sent += o.bits_sent;
    bit_errors += o.bit_errors;
    frame_errors += o.frame_errors;
    post_fec_bit_errors += o.post_fec_bit_errors;
    codeword_bytes += o.codeword_bytes;
    codeword_byte_errors += o.codeword_byte_errors;
    decode_failures += o.decode_failures;
    miscorrections += o.miscorrections;
    for (std::size_t i = 0; i < fec_hist.size(); ++i) fec_hist[i] += o.fec_hist[i];
    frames_synced += o.frames_synced;
    frames_missed += o.frames_missed;
    false_syncs += o.false_syncs;
}

BerPoint run_ber_point(const ExperimentConfig& cfg, double ebn0_db) {
    cfg.validate();
    BerPoint total;
    total.coding = cfg.coding;
    total.ebn0_db = ebn0_db;
    total.x = ebn0_db;

    const unsigned workers = worker_count(cfg);
    std::uint64_t next_block = 0;
    while (total.bit_errors < cfg.min_errors && total.bits_sent < cfg.max_bits) {
        // A batch has a fixed size so the stop point does not depend on the worker count.
        std::vector<BerPoint> results(static_cast<std::size_t>(cfg.blocks_per_batch));
        for (std::size_t first = 0; first < results.size(); first += workers) {
            std::vector<std::future<BerPoint>> jobs;
            for (std::size_t j = first; j < std::min(results.size(), first + workers); ++j)
                jobs.push_back(std::async(std::launch::async, simulate_block, std::cref(cfg), ebn0_db, next_block + j));
            for (std::size_t j = 0; j < jobs.size(); ++j) results[first + j] = jobs[j].get();
        }
        next_block += results.size();
        for (const auto& r : results) total.merge(r);
    }
    total.upper_bound = total.bit_errors < cfg.min_errors;
    return total;
}

BerReport run_ebn0_sweep(const ExperimentConfig& cfg) {
    BerReport report;
    report.mode = mode_name(Mode::ber_ebn0);
    for (double e : cfg.points) report.points.push_back(run_ber_point(cfg, e));
    return report;
}

BerReport run_distance_sweep(const ExperimentConfig& cfg) {
    BerReport report;
    report.mode = mode_name(Mode::ber_distance);
    for (double d : cfg.points) {
        const link::LinkResult lr = link::friis_snr(cfg.budget, d, cfg.modem.symbol_rate_hz);
        BerPoint p = run_ber_point(cfg, lr.ebn0_db);
        p.x = d;
        p.snr_db = lr.snr_db;
        report.points.push_back(p);
    }
    return report;
}

double ebn0_for_byte_error_rate(double target, std::uint64_t seed, std::size_t bytes) {
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target byte error rate must be in (0, 1)");
    const std::size_t symbols = bytes * 8 + 1;

    // Symbol-level model of the ideal detector. The noise is circular, so sending +1 on every
    // symbol loses nothing: z_k = 1 + n_k, n_k ~ CN(0, 1/(Eb/N0)); decision k errs when
    // Re(z_k conj(z_{k-1})) < 0. Reseeding keeps the noise shapes common to every trial.
    auto byte_error_rate = [&](double ebn0_db) {
        Rng rng = block_rng(seed, 0xB17E, 0);
        boost::random::normal_distribution<double> gauss(0.0, std::sqrt(1.0 / dsp::from_db(ebn0_db) / 2.0));
        cplx prev{1.0 + gauss(rng), gauss(rng)};
        std::size_t errors = 0;
        bool byte_bad = false;
        for (std::size_t k = 1; k < symbols; ++k) {
            const cplx cur{1.0 + gauss(rng), gauss(rng)};
            byte_bad |= (cur * std::conj(prev)).real() < 0.0;
            if (k % 8 == 0) {
                errors += byte_bad;
                byte_bad = false;
            }
            prev = cur;
        }
        return static_cast<double>(errors) / static_cast<double>(bytes);
    };

    double lo = 0.0, hi = 20.0;
    for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (byte_error_rate(mid) > target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

RoundtripReport run_frame_roundtrip(const ExperimentConfig& cfg) {
    cfg.validate();
    RoundtripReport r;
    Rng rng = block_rng(cfg.seed, 1, 0);
    const TxBlock tx = make_block(static_cast<std::size_t>(cfg.frames), 0, rng);
    r.frames_sent = cfg.frames;
    r.lead_in_bits = tx.lead_in;

    sync::SyncConfig scfg;
    scfg.threshold = cfg.sync_threshold;
    scfg.record_log = true;
    sync::FrameSynchronizer synchronizer(scfg);
    std::vector<sync::SyncedFrame> found;

    // Long runs go through the waveform chain as consecutive bursts so memory stays bounded;
    // the synchronizer sees one continuous bit stream.
    const std::size_t chunk = static_cast<std::size_t>(cfg.frames_per_block) * framing::kFrameBits;
    for (std::size_t start = 0; start < tx.bits.size(); start += chunk) {
        const std::size_t len = std::min(chunk, tx.bits.size() - start);
        const Bits piece(tx.bits.begin() + static_cast<std::ptrdiff_t>(start),
                         tx.bits.begin() + static_cast<std::ptrdiff_t>(start + len));
        synchronizer.push(transmit_receive(piece, cfg, cfg.ebn0_db, rng), found);
    }

    for (const auto& fr : found) {
        if (fr.start_bit < tx.lead_in || (fr.start_bit - tx.lead_in) % framing::kFrameBits != 0) {
            ++r.false_syncs;
            continue;
        }
        const std::size_t idx = (fr.start_bit - tx.lead_in) / framing::kFrameBits;
        if (idx >= tx.frames.size()) {
            ++r.false_syncs;
            continue;
        }
        const framing::ParsedFrame parsed = framing::parse_frame(fr.bytes, true);
        const int errs = bit_diff(parsed.payload, tx.frames[idx].payload);
        r.payload_bit_errors += static_cast<std::uint64_t>(errs);
        if (parsed.ok && errs == 0 && parsed.header == tx.frames[idx].header) ++r.frames_recovered;
    }
    r.frames_missed = r.frames_sent - std::min(r.frames_sent, r.frames_recovered);
    r.sync_log = synchronizer.log();
    return r;
}

modem::SoftStream run_eye_soft(const ExperimentConfig& cfg) {
    cfg.validate();
    Rng rng = block_rng(cfg.seed, 2, 0);
    Bits bits;
    append_random_bits(bits, 2 * cfg.eye_traces + 4, rng);
    const Bits encoded = modem::diff_encode(bits, 0);
    modem::SampleStream s = modem::dbpsk_modulate(encoded, cfg.modem, 0);
    s = channel::tdl_apply(s, cfg.channel).stream;
    s = channel::phase_noise_apply(s, cfg.channel.phase_noise_linewidth_hz, rng);
    s = channel::awgn_apply(s, cfg.ebn0_db, 1, cfg.modem.samples_per_symbol, rng);
    s = modem::rx_filter(s, cfg.modem);
    s = modem::agc(s).stream;
    return modem::delay_line_demod(s, cfg.modem);
}

modem::EyeRecord run_eye(const ExperimentConfig& cfg) {
    return modem::eye_capture(run_eye_soft(cfg), cfg.modem, cfg.eye_traces);
}

channel::ResponseProbe run_response(const ExperimentConfig& cfg) {
    cfg.validate();
    channel::ChainSpec chain;
    chain.modem = cfg.modem;
    chain.channel = cfg.channel;
    return channel::probe_response(chain);
}

framing::FifoResult run_fifo(const ExperimentConfig& cfg, bool record_trace) {
    cfg.validate();
    const auto plan = framing::make_clock_plan(framing::Rational(static_cast<std::int64_t>(cfg.modem.symbol_rate_hz)));
    const auto model = framing::FifoModel::transmit(plan, static_cast<std::size_t>(cfg.fifo_capacity_frames) * framing::kFrameBytes);
    return framing::simulate_fifo(model, cfg.fifo_events, record_trace);
}

}  // namespace mmw::harness
