#ifndef SUBHARMONIC_ORACLES_QUADRATURE_HPP
#define SUBHARMONIC_ORACLES_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "subharmonic/errors.hpp"
#include "subharmonic/qfunc.hpp"
#include "subharmonic/squeezing.hpp"

namespace subharmonic::oracles {

struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // for weight function exp(-x^2)
};

/// Gauss-Hermite rule by Golub-Welsch on the Jacobi matrix.
inline HermiteRule gauss_hermite(int n) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(0.5 * k);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    HermiteRule rule;
    const double mu0 = std::sqrt(std::numbers::pi);
    for (int k = 0; k < n; ++k) {
        rule.nodes.push_back(es.eigenvalues()[k]);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights.push_back(mu0 * v0 * v0);
    }
    return rule;
}

/// Integral of q_eval over both complex planes by a tensor-product
/// Gauss-Hermite rule in the four real coordinates. Coordinates are scaled by
/// 1/sqrt(u - |v|), the slowest decay of the exponent, so the residual factor
/// is bounded by one.
inline double integrate_q(const QGaussianParams& q, int nodes_per_axis = 24) {
    if (!q.normalizable()) throw invalid_parameter("Q parameters are not normalizable (need u > |v|)");
    const auto rule = gauss_hermite(nodes_per_axis);
    const double c = q.u - std::abs(q.v);
    const double scale = 1.0 / std::sqrt(c);
    const int n = nodes_per_axis;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::complex<double> alpha1{scale * rule.nodes[i], scale * rule.nodes[j]};
            const double w1 = rule.weights[i] * rule.weights[j];
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    const std::complex<double> alpha2{scale * rule.nodes[k], scale * rule.nodes[l]};
                    const double gauss = std::exp(-c * (std::norm(alpha1) + std::norm(alpha2)));
                    total += w1 * rule.weights[k] * rule.weights[l] * q_eval(q, alpha1, alpha2) / gauss;
                }
            }
        }
    }
    return total * std::pow(scale, 4);
}

/// Integral of spectrum_plus over the real line using omega = eta tan(theta).
inline double integrate_spectrum_plus(const ModelParams& p) {
    const double eta = 0.5 * p.kappa() + p.epsilon();
    auto f = [&](double th) {
        const double c = std::cos(th);
        return spectrum_plus(p, eta * std::tan(th)) * eta / (c * c);
    };
    const double h = 0.5 * std::numbers::pi;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -h, h, 15, 1e-14);
}

/// Integral of spectrum_plus over [-half_width, half_width] directly in omega.
inline double integrate_spectrum_window(const ModelParams& p, double half_width) {
    auto f = [&](double w) { return spectrum_plus(p, w); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -half_width, half_width, 20, 1e-14);
}

/// |integral of S_+ - var_plus|. Defined below and at threshold.
inline double spectrum_sum_rule_check(const ModelParams& p) {
    if (validate_regime(p).regime == Regime::above_threshold) {
        throw regime_error("spectrum sum rule is checked only up to threshold", p.margin());
    }
    return std::abs(integrate_spectrum_plus(p) - quadrature_variances(p).var_plus);
}

}  // namespace subharmonic::oracles

#endif  // SUBHARMONIC_ORACLES_QUADRATURE_HPP
