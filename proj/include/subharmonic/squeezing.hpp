#ifndef SUBHARMONIC_SQUEEZING_HPP
#define SUBHARMONIC_SQUEEZING_HPP

#include <cmath>
#include <numbers>
#include <optional>

#include "subharmonic/model.hpp"

namespace subharmonic {

/// Quadrature variance of the two-mode vacuum (a = a1 + a2, [a, a^dag] = 2).
inline constexpr double kVacuumVariance = 2.0;

struct QuadratureVariances {
    double var_plus;
    /// Empty at and above threshold, where the minus quadrature diverges.
    std::optional<double> var_minus;
    double margin;

    double minus() const {
        if (!var_minus) throw divergence_error("minus-quadrature variance diverges", margin);
        return *var_minus;
    }
};

inline QuadratureVariances quadrature_variances(const ModelParams& p) {
    const double k = p.kappa();
    const double e = p.epsilon();
    QuadratureVariances out{2.0 - 4.0 * e / (k + 2.0 * e), std::nullopt, p.margin()};
    if (is_below_threshold(p)) out.var_minus = 2.0 + 4.0 * e / (k - 2.0 * e);
    return out;
}

/// S = (2 - var_plus)/2 = 2 epsilon/(kappa + 2 epsilon).
inline double global_squeezing(const ModelParams& p) {
    const double k = p.kappa();
    const double e = p.epsilon();
    return 2.0 * e / (k + 2.0 * e);
}

/// Which expression to use for the output minus-quadrature variance.
enum class OutputMinusForm {
    sum_denominator,       // 2 + 4 kappa eps/(kappa + 2 eps)
    cavity_analogue,  // kappa var_minus + (1 - kappa) 2 = 2 + 4 kappa eps/(kappa - 2 eps)
};

struct OutputVariances {
    double var_plus_out;
    std::optional<double> var_minus_out;
};

namespace detail {
inline void require_transmissivity(const ModelParams& p) {
    if (!(p.kappa() > 0.0 && p.kappa() <= 1.0)) {
        throw invalid_parameter("output quantities treat kappa as a transmissivity; need 0 < kappa <= 1");
    }
}
}  // namespace detail

/// Output variances from mixing the transmitted cavity field (weight kappa)
/// with reflected vacuum (weight 1 - kappa).
inline OutputVariances output_variances(const ModelParams& p, OutputMinusForm form = OutputMinusForm::sum_denominator) {
    detail::require_transmissivity(p);
    const double k = p.kappa();
    const double e = p.epsilon();
    OutputVariances out{2.0 - 4.0 * k * e / (k + 2.0 * e), std::nullopt};
    if (form == OutputMinusForm::sum_denominator) {
        out.var_minus_out = 2.0 + 4.0 * k * e / (k + 2.0 * e);
    } else if (is_below_threshold(p)) {
        out.var_minus_out = 2.0 + 4.0 * k * e / (k - 2.0 * e);
    }
    return out;
}

inline double output_squeezing(const ModelParams& p) {
    detail::require_transmissivity(p);
    const double k = p.kappa();
    const double e = p.epsilon();
    return 2.0 * k * e / (k + 2.0 * e);
}

/// Lorentzian half-widths and the frequency window of a local measurement.
struct SpectrumWindow {
    double omega0;
    double half_width;
    double eta_plus;   // kappa/2 + epsilon
    double eta_minus;  // kappa/2 - epsilon
};

inline SpectrumWindow spectrum_window(const ModelParams& p, double half_width, double omega0 = 0.0) {
    if (!(half_width >= 0.0)) throw invalid_parameter("half-width must be non-negative");
    return SpectrumWindow{omega0, half_width, 0.5 * p.kappa() + p.epsilon(), 0.5 * p.kappa() - p.epsilon()};
}

/// Plus-quadrature fluctuation spectrum at offset omega - omega0.
/// Lorentzian of half-width kappa/2 + eps carrying total weight var_plus.
inline double spectrum_plus(const ModelParams& p, double offset) {
    const double k = p.kappa();
    const double e = p.epsilon();
    const double eta = 0.5 * k + e;
    return (eta / std::numbers::pi) / (offset * offset + eta * eta) * (2.0 * k / (k + 2.0 * e));
}

/// Plus-quadrature variance within [-half_width, half_width].
inline double local_variance_plus(const ModelParams& p, double half_width) {
    if (!(half_width >= 0.0)) throw invalid_parameter("half-width must be non-negative");
    const double k = p.kappa();
    const double e = p.epsilon();
    return 2.0 / std::numbers::pi * std::atan(half_width / (0.5 * k + e)) * (2.0 * k / (k + 2.0 * e));
}

/// Local squeezing relative to the vacuum variance in the same window.
inline double local_squeezing(const ModelParams& p, double half_width) {
    if (half_width == 0.0) {
        throw indeterminate_error("local squeezing is a ratio of two vanishing integrals at zero half-width");
    }
    if (!(half_width > 0.0)) throw invalid_parameter("half-width must be positive");
    const double k = p.kappa();
    const double e = p.epsilon();
    return 1.0 - std::atan(half_width / (0.5 * k + e)) / (2.0 * std::atan(2.0 * half_width / k)) *
                     (2.0 * k / (k + 2.0 * e));
}

/// Limit of local_squeezing as the half-width goes to zero: 1 - kappa^2/(kappa + 2 eps)^2.
inline double local_squeezing_limit_zero(const ModelParams& p) {
    const double r = p.kappa() / (p.kappa() + 2.0 * p.epsilon());
    return 1.0 - r * r;
}

struct SqueezingReport {
    double var_plus;
    std::optional<double> var_minus;
    double s_global;
    std::optional<double> var_plus_out;  // output quantities need 0 < kappa <= 1
    std::optional<double> var_minus_out;
    std::optional<double> s_out;
    double vacuum_level = kVacuumVariance;
    double margin;
};

inline SqueezingReport squeezing_report(const ModelParams& p, OutputMinusForm form = OutputMinusForm::sum_denominator) {
    const auto cav = quadrature_variances(p);
    SqueezingReport r{cav.var_plus, cav.var_minus, global_squeezing(p), {}, {}, {}, kVacuumVariance, p.margin()};
    if (p.kappa() <= 1.0) {
        const auto out = output_variances(p, form);
        r.var_plus_out = out.var_plus_out;
        r.var_minus_out = out.var_minus_out;
        r.s_out = output_squeezing(p);
    }
    return r;
}

}  // namespace subharmonic

#endif  // SUBHARMONIC_SQUEEZING_HPP
