#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mmw/bits.hpp"
#include "mmw/dsp.hpp"

namespace mmw::modem {

/// Complex-baseband DBPSK link parameters. A cutoff of 0 disables that filter.
struct ModemConfig {
    double symbol_rate_hz = 875e6;
    int samples_per_symbol = 8;
    double tx_band_limit_hz = 1e9;   // +/-1 GHz at baseband == 2 GHz IF passband
    double rx_band_limit_hz = 1e9;   // receive IF filter, same passband
    double lpf_cutoff_hz = 1e9;      // post-mixer lowpass
    int filter_taps = 63;
    bool matched_filter = true;      // integrate-and-dump ahead of the delay line
    int timing_offset = 0;           // samples, relative to mid-symbol
    double if_hz = 3.5e9;            // metadata; must give an integer number of carrier cycles per symbol

    double sample_rate_hz() const { return symbol_rate_hz * samples_per_symbol; }
    double symbol_period_s() const { return 1.0 / symbol_rate_hz; }
    int delay_samples() const { return samples_per_symbol; }
    double if_cycles_per_symbol() const { return if_hz / symbol_rate_hz; }

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;

    /// Hardware-like chain: NRZ, +/-1 GHz band limits, I&D, 1 GHz post-mixer LPF.
    static ModemConfig hardware_default();
    /// Optimum differential detector: NRZ, no band limits, I&D, no post-mixer LPF.
    static ModemConfig ideal(int samples_per_symbol = 8);
};

enum class Stage : int { modulated = 0, channel = 1, rx_filtered = 2, agc = 3 };

const char* stage_name(Stage s);

struct SampleStream {
    CVector samples;
    double sample_rate_hz = 0.0;
    Stage stage = Stage::modulated;
};

struct SoftStream {
    RVector values;
    double sample_rate_hz = 0.0;
    int samples_per_symbol = 0;
};

/// d[k] = b[k] ^ d[k-1], d[-1] = init.
Bits diff_encode(std::span<const std::uint8_t> bits, std::uint8_t init = 0);

/// Inverse of diff_encode (b[k] = d[k] ^ d[k-1]).
Bits diff_decode(std::span<const std::uint8_t> encoded, std::uint8_t init = 0);

/// One reference symbol carrying `reference_bit`, then one NRZ symbol per encoded bit
/// (bit 0 -> +1, bit 1 -> -1), then the transmit band limit.
SampleStream dbpsk_modulate(std::span<const std::uint8_t> encoded_bits, const ModemConfig& cfg,
                            std::uint8_t reference_bit = 0);

/// Receive IF band filter (identity when rx_band_limit_hz is 0).
SampleStream rx_filter(const SampleStream& rx, const ModemConfig& cfg);

struct AgcResult {
    SampleStream stream;
    std::vector<double> gain_db;  // one entry per block
    bool degenerate = false;      // a block had zero power
};

/// Block-wise gain toward target_power, clamped to +/- dynamic_range_db/2 around unity.
AgcResult agc(const SampleStream& rx, double target_power = 1.0, double dynamic_range_db = 20.0,
              std::size_t block_len = 1024);

/// y[n] = Re(z[n] conj(z[n - sps])) where z is the (optionally matched-filtered) input,
/// then the post-mixer lowpass. The first symbol has no reference and is dropped, so
/// output symbol k decides input symbol k + 1. Throws if the input is shorter than two symbols.
SoftStream delay_line_demod(const SampleStream& rx, const ModemConfig& cfg);

/// Mid-symbol sampling (plus cfg.timing_offset); bit 1 when soft < 0, ties go to 0.
Bits slice(const SoftStream& soft, const ModemConfig& cfg);

/// Soft values at the decision instants.
RVector decision_samples(const SoftStream& soft, const ModemConfig& cfg);

struct EyeRecord {
    /// One row per trace: 2*sps + 1 samples spanning +/-1 UI around a symbol mid-point.
    Eigen::MatrixXd traces;
    int samples_per_symbol = 0;
    /// (mu1 - 3 sigma1) - (mu0 + 3 sigma0) at mid-symbol, divided by the rail amplitude (mu1 - mu0)/2.
    double eye_height = 0.0;
    /// Inner-edge opening: min(upper) - max(lower) at mid-symbol, same normalization.
    double eye_height_inner = 0.0;
    /// Span in UI of contiguous sample offsets around mid-symbol where the 3-sigma eye is open.
    double eye_width_ui = 0.0;
    double level_one = 0.0;   // mean of traces above 0 at mid-symbol
    double level_zero = 0.0;  // mean of traces below 0
};

/// Overlays n_traces 2-UI windows centred on odd symbols. Needs (2 n_traces + 1) symbols.
EyeRecord eye_capture(const SoftStream& soft, const ModemConfig& cfg, std::size_t n_traces);

/// Soft values as little-endian float32, no header.
void write_soft_f32(std::ostream& os, const SoftStream& soft);
void emit_soft_f32(const SoftStream& soft, const std::string& path);

/// Multiplies by exp(j 2 pi df t); used to check frequency-offset behaviour.
SampleStream apply_frequency_offset(const SampleStream& s, double offset_hz);

}  // namespace mmw::modem
