#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mmw/channel.hpp"
#include "mmw/fifo.hpp"
#include "mmw/link_budget.hpp"
#include "mmw/modem.hpp"
#include "mmw/sync.hpp"

namespace mmw::harness {

enum class Mode { ber_ebn0, ber_distance, eye, response, frame_roundtrip, fifo_sim };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct ExperimentConfig {
    Mode mode = Mode::ber_ebn0;
    /// Eb/N0 in dB (ber-ebn0) or distances in metres (ber-distance).
    std::vector<double> points;
    std::string antennas = "horn";
    channel::ChannelProfile channel = channel::preset("los-only");
    modem::ModemConfig modem = modem::ModemConfig::hardware_default();
    link::LinkBudget budget;
    bool coding = false;
    std::uint64_t seed = 1;
    std::uint64_t min_errors = 100;
    std::uint64_t max_bits = 10'000'000;
    int frames_per_block = 16;
    int blocks_per_batch = 4;   // stop rule is evaluated after each batch
    int workers = 0;            // 0: hardware concurrency
    int sync_threshold = 29;
    /// eye / frame-roundtrip
    double ebn0_db = kNoNoise;
    std::size_t eye_traces = 2000;
    std::uint64_t frames = 1000;
    /// fifo-sim
    int fifo_capacity_frames = 2;
    std::uint64_t fifo_events = 1'000'000;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;
};

struct BerPoint {
    double x = 0.0;          // the sweep coordinate (Eb/N0 dB or distance m)
    double ebn0_db = 0.0;
    double snr_db = 0.0;     // link-budget SNR (distance sweeps)
    std::uint64_t frames = 0;
    std::uint64_t bits_sent = 0;       // payload bits, frames * 239 * 8
    std::uint64_t bit_errors = 0;      // before FEC
    std::uint64_t frame_errors = 0;    // frames whose delivered payload is wrong
    std::uint64_t post_fec_bit_errors = 0;
    std::uint64_t codeword_bytes = 0;
    std::uint64_t codeword_byte_errors = 0;
    std::uint64_t decode_failures = 0;
    std::uint64_t miscorrections = 0;
    std::array<std::uint64_t, 10> fec_hist{};  // corrected 0..8, [9] = decode failure
    std::uint64_t frames_synced = 0;
    std::uint64_t frames_missed = 0;
    std::uint64_t false_syncs = 0;
    bool coding = false;

    double ber() const { return bits_sent ? static_cast<double>(bit_errors) / static_cast<double>(bits_sent) : 0.0; }
    double post_fec_ber() const {
        return bits_sent ? static_cast<double>(post_fec_bit_errors) / static_cast<double>(bits_sent) : 0.0;
    }
    double byte_error_rate() const {
        return codeword_bytes ? static_cast<double>(codeword_byte_errors) / static_cast<double>(codeword_bytes) : 0.0;
    }
    /// 95 % normal-approximation interval: ber -/+ 1.96 sqrt(ber (1 - ber) / bits_sent), clamped to [0, 1].
    double ci_low() const;
    double ci_high() const;
    /// Stopped on max_bits before reaching min_errors.
    bool upper_bound = false;

    /// Sums counts; order-independent.
    void merge(const BerPoint& other);
};

struct BerReport {
    std::string mode;
    std::vector<BerPoint> points;
};

/// Full chain at one Eb/N0: frames -> scramble -> differential encode -> DBPSK -> channel ->
/// Rx filter -> AGC -> delay-line demod -> slice -> sync / descramble / decode.
/// Bit errors are counted on genie-aligned frames; the synchronizer's hits, misses and false
/// locks are reported separately. Block seeds depend on (seed, block), so every point of a
/// sweep sees the same payloads and noise shapes.
BerPoint run_ber_point(const ExperimentConfig& cfg, double ebn0_db);

BerReport run_ebn0_sweep(const ExperimentConfig& cfg);

/// friis_snr -> Eb/N0 -> run_ber_point for each distance in cfg.points.
BerReport run_distance_sweep(const ExperimentConfig& cfg);

/// Eb/N0 (dB) at which the ideal differential detector has the given probability of a
/// wrong byte, found by bisection over a symbol-level Monte-Carlo with common random numbers.
double ebn0_for_byte_error_rate(double target, std::uint64_t seed = 7, std::size_t bytes = 2'000'000);

struct RoundtripReport {
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_recovered = 0;   // synced at the true position with the right payload
    std::uint64_t payload_bit_errors = 0;
    std::uint64_t frames_missed = 0;
    std::uint64_t false_syncs = 0;
    std::uint64_t lead_in_bits = 0;
    std::vector<sync::DetectionRecord> sync_log;  // every correlator decision, in stream order
};

/// Sends cfg.frames frames after a random lead-in and recovers them with the synchronizer only.
RoundtripReport run_frame_roundtrip(const ExperimentConfig& cfg);

/// Demodulated soft stream used by run_eye: 2 cfg.eye_traces + 4 random symbols.
modem::SoftStream run_eye_soft(const ExperimentConfig& cfg);

/// Demodulated eye at cfg.ebn0_db through cfg.channel.
modem::EyeRecord run_eye(const ExperimentConfig& cfg);

channel::ResponseProbe run_response(const ExperimentConfig& cfg);

framing::FifoResult run_fifo(const ExperimentConfig& cfg, bool record_trace = true);

// CSV output. Column orders are fixed; numbers use fixed printf formats.
void write_ber_csv(std::ostream& os, const BerReport& report);
void write_eye_csv(std::ostream& os, const modem::EyeRecord& eye);
void write_response_csv(std::ostream& os, const channel::ResponseProbe& probe);
void write_fifo_csv(std::ostream& os, const framing::FifoResult& result);
void write_roundtrip_csv(std::ostream& os, const RoundtripReport& r);
void write_sync_log_csv(std::ostream& os, const std::vector<sync::DetectionRecord>& log);

/// File wrappers; throw std::runtime_error naming the path on I/O failure.
void emit_csv(const BerReport& report, const std::string& path);
void emit_eye(const modem::EyeRecord& eye, const std::string& path);
void emit_response(const channel::ResponseProbe& probe, const std::string& path);
void emit_fifo(const framing::FifoResult& result, const std::string& path);
void emit_roundtrip(const RoundtripReport& r, const std::string& path);
void emit_sync_log(const std::vector<sync::DetectionRecord>& log, const std::string& path);

}  // namespace mmw::harness
