#include "mmw/channel.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <json.hpp>

namespace mmw::channel {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

// Linear interpolation of the -3 dB crossing between bins a (open) and b (closed).
double crossing(double fa, double ma, double fb, double mb) {
    if (ma == mb) return fb;
    const double t = (-3.0 - ma) / (mb - ma);
    return fa + t * (fb - fa);
}

}  // namespace

void ChannelProfile::validate() const {
    if (taps.empty()) throw std::invalid_argument("channel profile '" + name + "': empty tap list");
    for (const Tap& t : taps) {
        if (!std::isfinite(t.delay_s) || !std::isfinite(t.gain_linear) || !std::isfinite(t.phase_rad))
            throw std::invalid_argument("channel profile '" + name + "': non-finite tap");
        if (t.delay_s < 0.0) throw std::invalid_argument("channel profile '" + name + "': negative tap delay");
    }
    if (taps.front().delay_s != 0.0)
        throw std::invalid_argument("channel profile '" + name + "': first tap must be the LOS tap at delay 0");
    if (!(phase_noise_linewidth_hz >= 0.0))
        throw std::invalid_argument("channel profile '" + name + "': phase-noise linewidth must be >= 0");
}

ChannelProfile preset(const std::string& name) {
    ChannelProfile p;
    p.name = name;
    if (name == "los-only") {
        p.taps = {Tap{0.0, 1.0, 0.0}};
    } else if (name == "two-ray") {
        p.taps = {Tap{0.0, 1.0, 0.0}, Tap{1.0 / 875e6, db_to_amplitude(-3.0), 0.0}};
    } else if (name == "corridor-like") {
        p.taps.clear();
        for (int i = 0; i < 4; ++i) p.taps.push_back(Tap{i * 1.2e-9, db_to_amplitude(-6.0 * i), i * 90.0 * kDeg});
    } else {
        throw std::invalid_argument("unknown channel preset '" + name + "'");
    }
    return p;
}

std::vector<std::string> preset_names() { return {"los-only", "two-ray", "corridor-like"}; }

ChannelProfile parse_profile_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("channel profile: ") + e.what());
    }
    ChannelProfile p;
    p.name = j.value("name", std::string("custom"));
    p.phase_noise_linewidth_hz = j.value("phase_noise_linewidth_hz", 0.0);
    if (!j.contains("taps") || !j["taps"].is_array())
        throw std::invalid_argument("channel profile: missing 'taps' array");
    p.taps.clear();
    for (const auto& t : j["taps"]) {
        Tap tap;
        tap.delay_s = t.value("delay_ns", 0.0) * 1e-9;
        tap.gain_linear = db_to_amplitude(t.value("gain_db", 0.0));
        tap.phase_rad = t.value("phase_deg", 0.0) * kDeg;
        p.taps.push_back(tap);
    }
    p.validate();
    return p;
}

ChannelProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open channel profile '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_profile_json(ss.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

ChannelProfile resolve_profile(const std::string& name_or_path) {
    for (const auto& n : preset_names())
        if (n == name_or_path) return preset(n);
    return load_profile(name_or_path);
}

TdlOutput tdl_apply(const modem::SampleStream& x, const ChannelProfile& profile) {
    profile.validate();
    TdlOutput out;
    out.stream.sample_rate_hz = x.sample_rate_hz;
    out.stream.stage = modem::Stage::channel;
    out.stream.samples = CVector::Zero(x.samples.size());
    const Eigen::Index n = x.samples.size();
    for (const Tap& t : profile.taps) {
        const double exact = t.delay_s * x.sample_rate_hz;
        const auto d = static_cast<Eigen::Index>(std::llround(exact));
        out.max_rounding_s = std::max(out.max_rounding_s, std::abs(exact - static_cast<double>(d)) / x.sample_rate_hz);
        out.delays_samples.push_back(d);
        if (d >= n) continue;
        const cplx coeff = std::polar(t.gain_linear, t.phase_rad);
        out.stream.samples.tail(n - d) += coeff * x.samples.head(n - d);
    }
    return out;
}

modem::SampleStream awgn_apply(const modem::SampleStream& x, double ebn0_db, int bits_per_symbol,
                               int samples_per_symbol, Rng& rng) {
    if (!std::isfinite(ebn0_db) || x.samples.size() == 0) return x;
    if (bits_per_symbol <= 0 || samples_per_symbol <= 0)
        throw std::invalid_argument("awgn_apply: bits_per_symbol and samples_per_symbol must be positive");
    const double power = dsp::mean_power(x.samples);
    const double ebn0 = dsp::from_db(ebn0_db);
    const double variance = power * samples_per_symbol / (bits_per_symbol * ebn0);
    boost::random::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
    modem::SampleStream out = x;
    for (Eigen::Index i = 0; i < out.samples.size(); ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        out.samples[i] += cplx{re, im};
    }
    return out;
}

modem::SampleStream phase_noise_apply(const modem::SampleStream& x, double linewidth_hz, Rng& rng) {
    if (!(linewidth_hz >= 0.0)) throw std::invalid_argument("phase_noise_apply: linewidth must be >= 0");
    if (linewidth_hz == 0.0) return x;
    const double step_var = 2.0 * std::numbers::pi * linewidth_hz / x.sample_rate_hz;
    boost::random::normal_distribution<double> gauss(0.0, std::sqrt(step_var));
    modem::SampleStream out = x;
    double theta = 0.0;
    for (Eigen::Index i = 0; i < out.samples.size(); ++i) {
        theta += gauss(rng);
        out.samples[i] *= std::polar(1.0, theta);
    }
    return out;
}

ResponseProbe probe_response(const ChainSpec& chain) {
    chain.modem.validate();
    const Eigen::Index nfft = chain.nfft;
    if (nfft < 64) throw std::invalid_argument("probe_response: nfft too small");
    const double fs = chain.modem.sample_rate_hz();
    const Eigen::Index origin = nfft / 8;

    modem::SampleStream s;
    s.sample_rate_hz = fs;
    s.samples = CVector::Zero(nfft);
    s.samples[origin] = 1.0;
    if (chain.include_tx_filter && chain.modem.tx_band_limit_hz > 0.0)
        s.samples = dsp::filter_same(s.samples, dsp::design_lowpass(chain.modem.filter_taps, chain.modem.tx_band_limit_hz, fs));
    s = tdl_apply(s, chain.channel).stream;
    if (chain.include_rx_filter) s = modem::rx_filter(s, chain.modem);

    ResponseProbe r;
    r.impulse = s.samples;
    r.time_s.resize(nfft);
    for (Eigen::Index i = 0; i < nfft; ++i) r.time_s[i] = static_cast<double>(i - origin) / fs;

    // Rotate so the probe origin sits at index 0 before transforming.
    CVector rotated(nfft);
    for (Eigen::Index i = 0; i < nfft; ++i) rotated[i] = s.samples[(i + origin) % nfft];
    const CVector h = dsp::dft(rotated, nfft);

    r.frequency_hz.resize(nfft);
    r.transfer.resize(nfft);
    r.magnitude_db.resize(nfft);
    const Eigen::Index half = nfft / 2;
    for (Eigen::Index i = 0; i < nfft; ++i) {
        const Eigen::Index bin = (i + half) % nfft;  // fftshift
        r.transfer[i] = h[bin];
        r.frequency_hz[i] = static_cast<double>(i - half) * fs / static_cast<double>(nfft);
    }
    r.dc_gain = std::abs(h[0]);
    const double ref = r.dc_gain > 0.0 ? r.dc_gain : 1.0;
    for (Eigen::Index i = 0; i < nfft; ++i)
        r.magnitude_db[i] = 20.0 * std::log10(std::max(std::abs(r.transfer[i]) / ref, 1e-300));

    // Walk outward from DC on each side to the first -3 dB crossing.
    double upper = r.frequency_hz[nfft - 1], lower = r.frequency_hz[0];
    for (Eigen::Index i = half; i + 1 < nfft; ++i)
        if (r.magnitude_db[i + 1] < -3.0) {
            upper = crossing(r.frequency_hz[i], r.magnitude_db[i], r.frequency_hz[i + 1], r.magnitude_db[i + 1]);
            break;
        }
    for (Eigen::Index i = half; i > 0; --i)
        if (r.magnitude_db[i - 1] < -3.0) {
            lower = crossing(r.frequency_hz[i], r.magnitude_db[i], r.frequency_hz[i - 1], r.magnitude_db[i - 1]);
            break;
        }
    r.bandwidth_3db_hz = upper - lower;
    return r;
}

}  // namespace mmw::channel
