#include "mmw/modem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace mmw::modem {

namespace {

void check_cutoff(double cutoff_hz, double nyquist_hz, const char* name) {
    if (cutoff_hz < 0.0 || !std::isfinite(cutoff_hz))
        throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
    if (cutoff_hz > 0.0 && cutoff_hz >= nyquist_hz)
        throw std::invalid_argument(std::string(name) + " must be below the Nyquist frequency");
}

}  // namespace

void ModemConfig::validate() const {
    if (!(symbol_rate_hz > 0.0)) throw std::invalid_argument("symbol_rate_hz must be positive");
    if (samples_per_symbol < 4) throw std::invalid_argument("samples_per_symbol must be >= 4");
    if (samples_per_symbol % 2 != 0) throw std::invalid_argument("samples_per_symbol must be even");
    if (filter_taps < 3 || filter_taps % 2 == 0) throw std::invalid_argument("filter_taps must be odd and >= 3");
    const double nyquist = sample_rate_hz() / 2.0;
    check_cutoff(tx_band_limit_hz, nyquist, "tx_band_limit_hz");
    check_cutoff(rx_band_limit_hz, nyquist, "rx_band_limit_hz");
    check_cutoff(lpf_cutoff_hz, nyquist, "lpf_cutoff_hz");
    if (std::abs(timing_offset) >= samples_per_symbol / 2)
        throw std::invalid_argument("timing_offset must stay within half a symbol");
    if (if_hz > 0.0) {
        // Baseband equivalence of the IF delay line needs whole carrier cycles per symbol.
        const double cycles = if_cycles_per_symbol();
        if (std::abs(cycles - std::round(cycles)) > 1e-9)
            throw std::invalid_argument("if_hz must be an integer multiple of the symbol rate");
    }
}

ModemConfig ModemConfig::hardware_default() { return ModemConfig{}; }

ModemConfig ModemConfig::ideal(int samples_per_symbol) {
    ModemConfig c;
    c.samples_per_symbol = samples_per_symbol;
    c.tx_band_limit_hz = 0.0;
    c.rx_band_limit_hz = 0.0;
    c.lpf_cutoff_hz = 0.0;
    c.matched_filter = true;
    return c;
}

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::modulated: return "modulated";
        case Stage::channel: return "channel";
        case Stage::rx_filtered: return "rx_filtered";
        case Stage::agc: return "agc";
    }
    return "unknown";
}

Bits diff_encode(std::span<const std::uint8_t> bits, std::uint8_t init) {
    Bits d(bits.size());
    std::uint8_t prev = init & 1u;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        prev = static_cast<std::uint8_t>((bits[k] ^ prev) & 1u);
        d[k] = prev;
    }
    return d;
}

Bits diff_decode(std::span<const std::uint8_t> encoded, std::uint8_t init) {
    Bits b(encoded.size());
    std::uint8_t prev = init & 1u;
    for (std::size_t k = 0; k < encoded.size(); ++k) {
        b[k] = static_cast<std::uint8_t>((encoded[k] ^ prev) & 1u);
        prev = encoded[k] & 1u;
    }
    return b;
}

SampleStream dbpsk_modulate(std::span<const std::uint8_t> encoded_bits, const ModemConfig& cfg,
                            std::uint8_t reference_bit) {
    cfg.validate();
    const int sps = cfg.samples_per_symbol;
    const auto n_sym = static_cast<Eigen::Index>(encoded_bits.size() + 1);
    SampleStream out;
    out.sample_rate_hz = cfg.sample_rate_hz();
    out.stage = Stage::modulated;
    out.samples.resize(n_sym * sps);
    for (Eigen::Index k = 0; k < n_sym; ++k) {
        const std::uint8_t bit = k == 0 ? reference_bit : encoded_bits[static_cast<std::size_t>(k - 1)];
        const double level = (bit & 1u) ? -1.0 : 1.0;
        out.samples.segment(k * sps, sps).setConstant(cplx{level, 0.0});
    }
    if (cfg.tx_band_limit_hz > 0.0) {
        const RVector taps = dsp::design_lowpass(cfg.filter_taps, cfg.tx_band_limit_hz, out.sample_rate_hz);
        out.samples = dsp::filter_same(out.samples, taps);
    }
    return out;
}

SampleStream rx_filter(const SampleStream& rx, const ModemConfig& cfg) {
    SampleStream out = rx;
    out.stage = Stage::rx_filtered;
    if (cfg.rx_band_limit_hz > 0.0) {
        const RVector taps = dsp::design_lowpass(cfg.filter_taps, cfg.rx_band_limit_hz, rx.sample_rate_hz);
        out.samples = dsp::filter_same(rx.samples, taps);
    }
    return out;
}

AgcResult agc(const SampleStream& rx, double target_power, double dynamic_range_db, std::size_t block_len) {
    if (!(target_power > 0.0)) throw std::invalid_argument("agc: target_power must be positive");
    if (block_len == 0) throw std::invalid_argument("agc: block_len must be positive");
    const double max_gain_db = dynamic_range_db / 2.0;

    AgcResult r;
    r.stream = rx;
    r.stream.stage = Stage::agc;
    const auto n = rx.samples.size();
    const auto blk = static_cast<Eigen::Index>(block_len);
    for (Eigen::Index start = 0; start < n; start += blk) {
        const Eigen::Index len = std::min(blk, n - start);
        const double p = dsp::mean_power(rx.samples.segment(start, len));
        double gain_db;
        if (p <= 0.0) {
            r.degenerate = true;
            gain_db = max_gain_db;
        } else {
            gain_db = std::clamp(dsp::to_db(target_power / p), -max_gain_db, max_gain_db);
        }
        r.gain_db.push_back(gain_db);
        r.stream.samples.segment(start, len) *= std::pow(10.0, gain_db / 20.0);
    }
    return r;
}

SoftStream delay_line_demod(const SampleStream& rx, const ModemConfig& cfg) {
    cfg.validate();
    if (std::abs(rx.sample_rate_hz - cfg.sample_rate_hz()) > 1e-6 * cfg.sample_rate_hz())
        throw std::invalid_argument("delay_line_demod: stream sample rate does not match the modem config");
    const Eigen::Index sps = cfg.samples_per_symbol;
    if (rx.samples.size() < 2 * sps)
        throw std::invalid_argument("delay_line_demod: stream shorter than two symbols");

    const CVector z = cfg.matched_filter ? dsp::moving_average_centered(rx.samples, sps) : rx.samples;
    const Eigen::Index n_out = z.size() - sps;
    SoftStream out;
    out.sample_rate_hz = rx.sample_rate_hz;
    out.samples_per_symbol = cfg.samples_per_symbol;
    out.values = (z.tail(n_out).array() * z.head(n_out).array().conjugate()).real();
    if (cfg.lpf_cutoff_hz > 0.0) {
        const RVector taps = dsp::design_lowpass(cfg.filter_taps, cfg.lpf_cutoff_hz, rx.sample_rate_hz);
        out.values = dsp::filter_same(out.values, taps);
    }
    return out;
}

RVector decision_samples(const SoftStream& soft, const ModemConfig& cfg) {
    const Eigen::Index sps = soft.samples_per_symbol;
    if (sps <= 0) throw std::invalid_argument("decision_samples: soft stream has no symbol metadata");
    const Eigen::Index n_sym = soft.values.size() / sps;
    RVector v(n_sym);
    for (Eigen::Index k = 0; k < n_sym; ++k) {
        const Eigen::Index idx = std::clamp<Eigen::Index>(k * sps + sps / 2 + cfg.timing_offset, 0, soft.values.size() - 1);
        v[k] = soft.values[idx];
    }
    return v;
}

Bits slice(const SoftStream& soft, const ModemConfig& cfg) {
    const RVector v = decision_samples(soft, cfg);
    Bits out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index k = 0; k < v.size(); ++k) out[static_cast<std::size_t>(k)] = v[k] < 0.0 ? 1 : 0;
    return out;
}

EyeRecord eye_capture(const SoftStream& soft, const ModemConfig& cfg, std::size_t n_traces) {
    const Eigen::Index sps = soft.samples_per_symbol;
    if (sps <= 0 || n_traces == 0) throw std::invalid_argument("eye_capture: need symbol metadata and n_traces > 0");
    const auto traces = static_cast<Eigen::Index>(n_traces);
    const Eigen::Index width = 2 * sps + 1;
    const Eigen::Index needed = (2 * traces + 1) * sps;
    if (soft.values.size() < needed)
        throw std::invalid_argument("eye_capture: stream too short for " + std::to_string(n_traces) + " traces");

    EyeRecord eye;
    eye.samples_per_symbol = static_cast<int>(sps);
    eye.traces.resize(traces, width);
    for (Eigen::Index i = 0; i < traces; ++i) {
        const Eigen::Index centre = (2 * i + 1) * sps + sps / 2 + cfg.timing_offset;
        for (Eigen::Index j = 0; j < width; ++j) {
            const Eigen::Index idx = std::clamp<Eigen::Index>(centre - sps + j, 0, soft.values.size() - 1);
            eye.traces(i, j) = soft.values[idx];
        }
    }

    // Split traces into the two rails by their mid-symbol sign.
    const Eigen::VectorXd mid = eye.traces.col(sps);
    std::vector<Eigen::Index> ones, zeros;
    for (Eigen::Index i = 0; i < traces; ++i) (mid[i] >= 0.0 ? ones : zeros).push_back(i);
    if (ones.empty() || zeros.empty()) return eye;  // one-rail record: eye undefined, metrics stay 0

    auto stats = [&](const std::vector<Eigen::Index>& rows, Eigen::Index col) {
        double sum = 0.0, sq = 0.0, lo = 1e300, hi = -1e300;
        for (auto r : rows) {
            const double v = eye.traces(r, col);
            sum += v;
            sq += v * v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double n = static_cast<double>(rows.size());
        const double mean = sum / n;
        const double var = std::max(0.0, sq / n - mean * mean);
        struct S { double mean, sigma, lo, hi; };
        return S{mean, std::sqrt(var), lo, hi};
    };

    const auto up = stats(ones, sps);
    const auto dn = stats(zeros, sps);
    eye.level_one = up.mean;
    eye.level_zero = dn.mean;
    const double rail = (up.mean - dn.mean) / 2.0;
    if (rail <= 0.0) return eye;
    eye.eye_height = ((up.mean - 3.0 * up.sigma) - (dn.mean + 3.0 * dn.sigma)) / rail;
    eye.eye_height_inner = (up.lo - dn.hi) / rail;

    auto open_at = [&](Eigen::Index col) {
        const auto u = stats(ones, col);
        const auto d = stats(zeros, col);
        return (u.mean - 3.0 * u.sigma) > (d.mean + 3.0 * d.sigma);
    };
    if (open_at(sps)) {
        Eigen::Index left = sps, right = sps;
        while (left > 0 && open_at(left - 1)) --left;
        while (right < width - 1 && open_at(right + 1)) ++right;
        eye.eye_width_ui = static_cast<double>(right - left) / static_cast<double>(sps);
    }
    return eye;
}

void write_soft_f32(std::ostream& os, const SoftStream& soft) {
    std::vector<char> buf(static_cast<std::size_t>(soft.values.size()) * 4);
    for (Eigen::Index i = 0; i < soft.values.size(); ++i) {
        std::uint32_t w = std::bit_cast<std::uint32_t>(static_cast<float>(soft.values[i]));
        for (int b = 0; b < 4; ++b) buf[static_cast<std::size_t>(i) * 4 + static_cast<std::size_t>(b)] = static_cast<char>((w >> (8 * b)) & 0xFFu);
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void emit_soft_f32(const SoftStream& soft, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_soft_f32(out, soft);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

SampleStream apply_frequency_offset(const SampleStream& s, double offset_hz) {
    SampleStream out = s;
    const double step = 2.0 * std::numbers::pi * offset_hz / s.sample_rate_hz;
    for (Eigen::Index n = 0; n < s.samples.size(); ++n)
        out.samples[n] *= std::polar(1.0, step * static_cast<double>(n));
    return out;
}

}  // namespace mmw::modem
