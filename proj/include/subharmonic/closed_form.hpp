#ifndef SUBHARMONIC_CLOSED_FORM_HPP
#define SUBHARMONIC_CLOSED_FORM_HPP

#include <optional>

#include "subharmonic/model.hpp"

namespace subharmonic {

/// Nonzero steady-state second moments of the two signal modes.
///
/// First moments <a1>, <a2> vanish, as do <a1^2>, <a2^2> and <a1^dag a2>;
/// the two marker fields record that explicitly for serializers.
struct SteadyMoments {
    double n1;     // <a1^dag a1>
    double n2;     // <a2^dag a2>
    double cross;  // <a1 a2>, real and <= 0
    bool first_moments_zero = true;
    bool vanishing_moments_zero = true;
};

struct PhotonStatistics {
    double mean;
    double variance;
    std::optional<double> fano;  // empty for the vacuum (0/0)
};

struct PumpMean {
    double value;
    bool depletion_warning;  // set when 4 mu^2/kappa^2 - n1 goes negative
};

inline SteadyMoments steady_moments(const ModelParams& p) {
    require_below_threshold(p, "steady_moments");
    const double k = p.kappa();
    const double e = p.epsilon();
    const double d = threshold_denominator(p);
    const double n = 2.0 * e * e / d;
    return SteadyMoments{n, n, -k * e / d};
}

/// n-bar = <a^dag a> for a = a1 + a2.
inline double mean_photon_number(const ModelParams& p) {
    require_below_threshold(p, "mean_photon_number");
    const double e = p.epsilon();
    return 4.0 * e * e / threshold_denominator(p);
}

inline double photon_number_variance(const ModelParams& p) {
    require_below_threshold(p, "photon_number_variance");
    const double k = p.kappa();
    const double e = p.epsilon();
    const double d = threshold_denominator(p);
    const double e2 = e * e;
    return 8.0 * e2 / d + 16.0 * e2 * e2 / (d * d) + 4.0 * k * k * e2 / (d * d);
}

inline PhotonStatistics photon_statistics(const ModelParams& p) {
    PhotonStatistics s{mean_photon_number(p), photon_number_variance(p), std::nullopt};
    if (s.mean > 0.0) s.fano = s.variance / s.mean;
    return s;
}

/// Mean photon number of the classically driven pump mode, 4 mu^2/kappa^2 - n1.
inline PumpMean pump_mean_photon_number(const ModelParams& p) {
    if (!p.pump()) {
        throw invalid_parameter("pump_mean_photon_number needs the pump drive (mu, g)");
    }
    require_below_threshold(p, "pump_mean_photon_number");
    const double k = p.kappa();
    const double mu = p.pump()->mu;
    const double e = p.epsilon();
    const double value = 4.0 * mu * mu / (k * k) - 2.0 * e * e / threshold_denominator(p);
    return PumpMean{value, value < 0.0};
}

/// <a^dag a> for the degenerate beam under the second-order (a^2) Hamiltonian.
inline double conventional_mean_photon_number(const ModelParams& p) {
    require_below_threshold(p, "conventional_mean_photon_number");
    const double e = p.epsilon();
    return 2.0 * e * e / threshold_denominator(p);
}

}  // namespace subharmonic

#endif  // SUBHARMONIC_CLOSED_FORM_HPP
