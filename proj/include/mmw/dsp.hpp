#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace mmw {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using CVector = VectorX<cplx>;
using RVector = VectorX<double>;

namespace dsp {

/// Linear-phase lowpass FIR: Hamming-windowed sinc, unity DC gain.
/// cutoff_hz is the -6 dB edge. num_taps must be odd so the group delay is an integer.
RVector design_lowpass(int num_taps, double cutoff_hz, double sample_rate_hz);

/// Convolution with an odd-length linear-phase FIR, group delay removed
/// ("same" alignment: output[n] lines up with input[n]). Zero padding at both ends.
template <typename Scalar>
VectorX<Scalar> filter_same(const VectorX<Scalar>& x, const RVector& taps) {
    const Eigen::Index n = x.size();
    const Eigen::Index m = taps.size();
    const Eigen::Index half = m / 2;
    VectorX<Scalar> padded = VectorX<Scalar>::Zero(n + m - 1);
    padded.segment(m - 1 - half, n) = x;
    VectorX<Scalar> y = VectorX<Scalar>::Zero(n);
    // Real taps act on the real and imaginary parts alike, so a complex signal is filtered as
    // an interleaved real array with element stride w. y[i] = sum_k taps[k] padded[i + m - 1 - k].
    constexpr Eigen::Index w = sizeof(Scalar) / sizeof(double);
    const Eigen::Map<const RVector> in(reinterpret_cast<const double*>(padded.data()), w * padded.size());
    Eigen::Map<RVector> out(reinterpret_cast<double*>(y.data()), w * n);
    constexpr Eigen::Index kBlock = 2048;
    for (Eigen::Index b = 0; b < w * n; b += kBlock) {
        const Eigen::Index len = std::min(kBlock, w * n - b);
        auto dst = out.segment(b, len);
        for (Eigen::Index k = 0; k < m; ++k) dst += taps[k] * in.segment(b + w * (m - 1 - k), len);
    }
    return y;
}

/// Full linear convolution (length x.size() + taps.size() - 1).
template <typename Scalar>
VectorX<Scalar> convolve_full(const VectorX<Scalar>& x, const RVector& taps) {
    const Eigen::Index n = x.size(), m = taps.size();
    if (n == 0 || m == 0) return VectorX<Scalar>();
    VectorX<Scalar> y = VectorX<Scalar>::Zero(n + m - 1);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < m; ++k) y[i + k] += taps[k] * x[i];
    return y;
}

/// Mean over the window [n - len/2, n - len/2 + len), zero outside the input.
/// For even len = samples per symbol this is an integrate-and-dump whose output at a
/// symbol mid-point covers exactly that symbol.
template <typename Scalar>
VectorX<Scalar> moving_average_centered(const VectorX<Scalar>& x, Eigen::Index len) {
    const Eigen::Index n = x.size();
    VectorX<Scalar> prefix(n + 1);
    prefix[0] = Scalar{0};
    for (Eigen::Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
    VectorX<Scalar> y(n);
    const double scale = 1.0 / static_cast<double>(len);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index lo = std::clamp<Eigen::Index>(i - len / 2, 0, n);
        const Eigen::Index hi = std::clamp<Eigen::Index>(i - len / 2 + len, 0, n);
        y[i] = (prefix[hi] - prefix[lo]) * scale;
    }
    return y;
}

/// Mean of |x|^2.
template <typename Derived>
double mean_power(const Eigen::MatrixBase<Derived>& x) {
    if (x.size() == 0) return 0.0;
    return x.cwiseAbs2().sum() / static_cast<double>(x.size());
}

/// Zero-padded DFT of a (short) impulse response, nfft bins.
CVector dft(const CVector& h, Eigen::Index nfft);

inline double to_db(double power_ratio) { return 10.0 * std::log10(power_ratio); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace dsp
}  // namespace mmw
