#ifndef SUBHARMONIC_ORACLES_Q_SAMPLER_HPP
#define SUBHARMONIC_ORACLES_Q_SAMPLER_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "subharmonic/errors.hpp"
#include "subharmonic/qfunc.hpp"

namespace subharmonic::oracles {

/// Antinormally ordered moments estimated from samples of Q.
struct QSampleMoments {
    std::uint64_t count;
    double mean_abs1_sq;     // -> <a1 a1^dag> = n1 + 1
    double mean_abs2_sq;     // -> <a2 a2^dag> = n2 + 1
    std::complex<double> mean_a1a2;  // -> <a1 a2>
    std::complex<double> mean_alpha1;
    double stderr_abs1_sq;
    double stderr_a1a2_re;
};

namespace detail {

/// Standard normal pairs by Box-Muller on the raw 64-bit engine output, so a
/// given (seed, count) reproduces the same stream on every standard library.
class NormalPairs {
public:
    explicit NormalPairs(std::uint64_t seed) : engine_(seed) {}

    std::pair<double, double> next() {
        const double u1 = open_unit();
        const double u2 = open_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

private:
    double open_unit() {
        // 53 random bits mapped into (0, 1)
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
};

}  // namespace detail

/// Draws (alpha1, alpha2) from the density Q and averages antinormal moments.
///
/// With z = (alpha1, alpha2*), Q is proportional to exp(-z^dag M z) for
/// M = [[u, v], [v, u]], so z is a circular complex Gaussian with covariance
/// M^-1 = [[u, -v], [-v, u]]/(u^2 - v^2).
inline QSampleMoments sample_q(const QGaussianParams& q, std::uint64_t count, std::uint64_t seed) {
    if (!q.normalizable()) throw invalid_parameter("Q parameters are not normalizable (need u > |v|)");
    if (count == 0) throw invalid_parameter("sample count must be at least 1");

    const double det = q.det();
    const double c11 = q.u / det;
    const double c12 = -q.v / det;
    const double l11 = std::sqrt(c11);
    const double l21 = c12 / l11;
    const double l22 = std::sqrt(c11 - l21 * l21);

    detail::NormalPairs normals(seed);
    const double s = std::sqrt(0.5);
    double sum_abs1 = 0, sum_abs1_sq = 0, sum_abs2 = 0;
    double sum_re = 0, sum_re_sq = 0, sum_im = 0;
    std::complex<double> sum_alpha1{};
    for (std::uint64_t k = 0; k < count; ++k) {
        const auto [x1, y1] = normals.next();
        const auto [x2, y2] = normals.next();
        const std::complex<double> w1{s * x1, s * y1};
        const std::complex<double> w2{s * x2, s * y2};
        const std::complex<double> z1 = l11 * w1;
        const std::complex<double> z2 = l21 * w1 + l22 * w2;
        const std::complex<double> alpha1 = z1;
        const std::complex<double> alpha2 = std::conj(z2);

        const double a1 = std::norm(alpha1);
        const std::complex<double> prod = alpha1 * alpha2;
        sum_abs1 += a1;
        sum_abs1_sq += a1 * a1;
        sum_abs2 += std::norm(alpha2);
        sum_re += prod.real();
        sum_re_sq += prod.real() * prod.real();
        sum_im += prod.imag();
        sum_alpha1 += alpha1;
    }
    const double n = static_cast<double>(count);
    QSampleMoments out;
    out.count = count;
    out.mean_abs1_sq = sum_abs1 / n;
    out.mean_abs2_sq = sum_abs2 / n;
    out.mean_a1a2 = {sum_re / n, sum_im / n};
    out.mean_alpha1 = sum_alpha1 / n;
    out.stderr_abs1_sq = std::sqrt(std::max(0.0, sum_abs1_sq / n - out.mean_abs1_sq * out.mean_abs1_sq) / n);
    out.stderr_a1a2_re = std::sqrt(std::max(0.0, sum_re_sq / n - out.mean_a1a2.real() * out.mean_a1a2.real()) / n);
    return out;
}

}  // namespace subharmonic::oracles

#endif  // SUBHARMONIC_ORACLES_Q_SAMPLER_HPP
