#ifndef SUBHARMONIC_QFUNC_HPP
#define SUBHARMONIC_QFUNC_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "subharmonic/model.hpp"

namespace subharmonic {

/// Exponent coefficients of the Gaussian Q function and of its
/// antinormally ordered characteristic function.
///
///   phi_a(z, eta) = exp[-a (|z|^2 + |eta|^2) - b (z eta + z* eta*)]
///   Q(a1, a2)     = (u^2 - v^2)/pi^2 exp[-u (|a1|^2 + |a2|^2) - v (a1 a2 + a1* a2*)]
struct QGaussianParams {
    double a_coef;
    double b_coef;
    double u;
    double v;

    /// u^2 - v^2, also the vacuum probability P(0,0).
    double det() const noexcept { return (u - v) * (u + v); }
    bool normalizable() const noexcept { return u > std::abs(v) && det() > 0.0; }
};

inline QGaussianParams q_params(const ModelParams& p) {
    require_below_threshold(p, "q_params");
    const double k = p.kappa();
    const double e = p.epsilon();
    const double d = threshold_denominator(p);
    const double a = (k * k - 2.0 * e * e) / d;
    const double b = k * e / d;
    const double ab = (a - b) * (a + b);
    return QGaussianParams{a, b, a / ab, b / ab};
}

inline double q_eval(const QGaussianParams& q, std::complex<double> alpha1, std::complex<double> alpha2) {
    const double r2 = std::norm(alpha1) + std::norm(alpha2);
    // a1 a2 + a1* a2* = 2 Re(a1 a2)
    const double mix = 2.0 * (alpha1 * alpha2).real();
    return q.det() / (std::numbers::pi * std::numbers::pi) * std::exp(-q.u * r2 - q.v * mix);
}

namespace detail {

inline double joint_distribution_direct(const QGaussianParams& q, unsigned m, unsigned n) {
    const double x = 1.0 - q.u;
    const double y = q.v * q.v;
    const unsigned kmax = std::min(m, n);
    double sum = 0.0;
    for (unsigned k = 0; k <= kmax; ++k) {
        // m! n! / ((m-k)! (n-k)! k!^2) = C(m,k) C(n,k)
        double binom = 1.0;
        for (unsigned i = 0; i < k; ++i) {
            binom *= static_cast<double>(m - i) * static_cast<double>(n - i);
            binom /= static_cast<double>(i + 1) * static_cast<double>(i + 1);
        }
        sum += binom * std::pow(x, static_cast<int>(m + n - 2 * k)) * std::pow(y, static_cast<int>(k));
    }
    return q.det() * sum;
}

inline double joint_distribution_log(const QGaussianParams& q, unsigned m, unsigned n) {
    const double x = 1.0 - q.u;
    const double y = q.v * q.v;
    const double lx = std::log(x);  // -inf when x == 0
    const double ly = std::log(y);
    const double base = std::lgamma(m + 1.0) + std::lgamma(n + 1.0);
    const unsigned kmax = std::min(m, n);
    std::vector<double> logs;
    logs.reserve(kmax + 1);
    for (unsigned k = 0; k <= kmax; ++k) {
        const unsigned px = m + n - 2 * k;
        if ((px > 0 && x == 0.0) || (k > 0 && y == 0.0)) continue;
        double t = base - std::lgamma(m - k + 1.0) - std::lgamma(n - k + 1.0) - 2.0 * std::lgamma(k + 1.0);
        if (px > 0) t += px * lx;
        if (k > 0) t += k * ly;
        logs.push_back(t);
    }
    if (logs.empty()) return 0.0;
    const double top = *std::max_element(logs.begin(), logs.end());
    double acc = 0.0;
    for (double t : logs) acc += std::exp(t - top);
    return q.det() * std::exp(top + std::log(acc));
}

}  // namespace detail

/// P(m, n): probability of m photons in mode 1 and n in mode 2.
inline double joint_photon_distribution(const QGaussianParams& q, unsigned m, unsigned n) {
    if (m + n > 20) return detail::joint_distribution_log(q, m, n);
    return detail::joint_distribution_direct(q, m, n);
}

/// P(n, n), the probability of a matched pair count.
inline double diagonal_distribution(const QGaussianParams& q, unsigned n) {
    return joint_photon_distribution(q, n, n);
}

/// Geometric ratio of the thermal single-mode marginal, n1/(n1+1).
inline double marginal_ratio(const QGaussianParams& q) noexcept {
    return 1.0 - q.det() / q.u;
}

/// Smallest N with the mass outside [0,N]^2 bounded by 2 r^(N+1) < tail_tol.
inline unsigned adaptive_cutoff(const QGaussianParams& q, double tail_tol = 1e-10) {
    const double r = marginal_ratio(q);
    if (r <= 0.0) return 0;
    const double need = std::log(tail_tol / 2.0) / std::log(r) - 1.0;
    return static_cast<unsigned>(std::max(0.0, std::ceil(need)));
}

/// P(m, n) for 0 <= m, n <= cutoff, row-major with stride cutoff+1.
inline std::vector<double> joint_distribution_table(const QGaussianParams& q, unsigned cutoff) {
    const unsigned w = cutoff + 1;
    std::vector<double> table(static_cast<std::size_t>(w) * w);
    for (unsigned m = 0; m < w; ++m) {
        for (unsigned n = m; n < w; ++n) {
            const double pmn = joint_photon_distribution(q, m, n);
            table[m * w + n] = pmn;
            table[n * w + m] = pmn;
        }
    }
    return table;
}

}  // namespace subharmonic

#endif  // SUBHARMONIC_QFUNC_HPP
