#include "mmw/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace mmw::dsp {

RVector design_lowpass(int num_taps, double cutoff_hz, double sample_rate_hz) {
    if (num_taps < 3 || num_taps % 2 == 0) throw std::invalid_argument("design_lowpass: num_taps must be odd and >= 3");
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2))
        throw std::invalid_argument("design_lowpass: cutoff must lie in (0, Nyquist)");
    const double fc = cutoff_hz / sample_rate_hz;
    const int mid = num_taps / 2;
    RVector h(num_taps);
    for (int i = 0; i < num_taps; ++i) {
        const double t = i - mid;
        const double sinc = t == 0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * t) / (std::numbers::pi * t);
        const double window = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (num_taps - 1));
        h[i] = sinc * window;
    }
    return h / h.sum();
}

CVector dft(const CVector& h, Eigen::Index nfft) {
    if (nfft < h.size()) throw std::invalid_argument("dft: nfft shorter than the impulse response");
    std::vector<cplx> in(static_cast<std::size_t>(nfft), cplx{0.0, 0.0});
    for (Eigen::Index i = 0; i < h.size(); ++i) in[static_cast<std::size_t>(i)] = h[i];
    std::vector<cplx> out;
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    return Eigen::Map<const CVector>(out.data(), nfft);
}

}  // namespace mmw::dsp
