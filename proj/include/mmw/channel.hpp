#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mmw/modem.hpp"

namespace mmw::channel {

using Rng = std::mt19937_64;

struct Tap {
    double delay_s = 0.0;
    double gain_linear = 1.0;
    double phase_rad = 0.0;
};

/// Tapped delay line plus optional impairments. taps[0] is the line-of-sight reference at delay 0.
struct ChannelProfile {
    std::string name = "los-only";
    std::vector<Tap> taps{Tap{}};
    /// Wiener phase-noise linewidth; 0 disables.
    double phase_noise_linewidth_hz = 0.0;

    /// Throws std::invalid_argument on an empty list, negative delays, non-finite values,
    /// or a first tap that is not at delay 0.
    void validate() const;
};

/// Built-in presets. None of the multipath numbers are measured values.
///   los-only      : single unit tap
///   two-ray       : LOS + echo at -3 dB, one symbol (1/875 MHz) later, in phase
///   corridor-like : 4 taps every 1.2 ns, decaying 6 dB per tap, phases 0/90/180/270 deg
ChannelProfile preset(const std::string& name);
std::vector<std::string> preset_names();

/// JSON schema:
///   { "name": "...", "phase_noise_linewidth_hz": 0,
///     "taps": [ { "delay_ns": 0, "gain_db": 0, "phase_deg": 0 }, ... ] }
ChannelProfile parse_profile_json(const std::string& text);
ChannelProfile load_profile(const std::string& path);

/// A preset name, otherwise a path to a JSON profile.
ChannelProfile resolve_profile(const std::string& name_or_path);

struct TdlOutput {
    modem::SampleStream stream;
    /// Largest |requested delay - applied delay| after rounding to whole samples.
    double max_rounding_s = 0.0;
    std::vector<Eigen::Index> delays_samples;
};

/// y[n] = sum_i g_i e^{j phi_i} x[n - d_i], d_i = round(tau_i fs). Output length equals input length.
TdlOutput tdl_apply(const modem::SampleStream& x, const ChannelProfile& profile);

/// Adds circular complex Gaussian noise with per-sample variance
/// P * sps / (bits_per_symbol * Eb/N0), P the measured mean power of the input.
/// A non-finite ebn0_db (+inf) leaves the stream unchanged.
modem::SampleStream awgn_apply(const modem::SampleStream& x, double ebn0_db, int bits_per_symbol,
                               int samples_per_symbol, Rng& rng);

/// Multiplies by exp(j theta[n]), theta a Wiener walk with increment variance
/// 2 pi linewidth / fs. Linewidth 0 is the identity.
modem::SampleStream phase_noise_apply(const modem::SampleStream& x, double linewidth_hz, Rng& rng);

/// Linear stages of the link for response probing.
struct ChainSpec {
    modem::ModemConfig modem = modem::ModemConfig::hardware_default();
    ChannelProfile channel = preset("los-only");
    bool include_tx_filter = true;
    bool include_rx_filter = true;
    Eigen::Index nfft = 8192;
};

struct ResponseProbe {
    RVector frequency_hz;  // baseband, -fs/2 .. fs/2 (fftshifted)
    RVector magnitude_db;  // relative to |H(0)|
    CVector transfer;      // H(f), same ordering
    RVector time_s;
    CVector impulse;       // chain impulse response, index 0 at the Tx filter's group delay
    double dc_gain = 0.0;
    /// Two-sided -3 dB width at baseband == passband-equivalent bandwidth.
    double bandwidth_3db_hz = 0.0;
};

ResponseProbe probe_response(const ChainSpec& chain);

}  // namespace mmw::channel
