#ifndef SUBHARMONIC_MODEL_HPP
#define SUBHARMONIC_MODEL_HPP

#include <cmath>
#include <optional>
#include <string>

#include "subharmonic/errors.hpp"

namespace subharmonic {

/// Effective pump amplitude from the classical pump steady state b = 2*mu/kappa.
inline double epsilon_from_pump(double mu, double g, double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw invalid_parameter("kappa must be positive and finite");
    }
    if (!(mu >= 0.0) || !(g >= 0.0) || !std::isfinite(mu) || !std::isfinite(g)) {
        throw invalid_parameter("mu and g must be non-negative and finite");
    }
    return 2.0 * mu * g / kappa;
}

/// Pump drive used to derive epsilon; kept so the pump-mode mean can be evaluated.
struct PumpDrive {
    double mu;
    double g;
};

/// Physical parameters of the two-mode cavity. Immutable once built.
///
/// Both signal modes share the damping rate kappa. Every closed form depends
/// only on epsilon/kappa; the dimensional values are kept for the CLI.
class ModelParams {
public:
    static ModelParams from_epsilon(double kappa, double epsilon) {
        if (!(kappa > 0.0) || !std::isfinite(kappa)) {
            throw invalid_parameter("kappa must be positive and finite");
        }
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
            throw invalid_parameter("epsilon must be non-negative and finite");
        }
        return ModelParams(kappa, epsilon, std::nullopt);
    }

    static ModelParams from_pump(double kappa, double mu, double g) {
        const double eps = epsilon_from_pump(mu, g, kappa);
        return ModelParams(kappa, eps, PumpDrive{mu, g});
    }

    double kappa() const noexcept { return kappa_; }
    double epsilon() const noexcept { return epsilon_; }
    const std::optional<PumpDrive>& pump() const noexcept { return pump_; }

    /// kappa - 2*epsilon, positive below threshold.
    double margin() const noexcept { return kappa_ - 2.0 * epsilon_; }

    ModelParams scaled(double c) const {
        if (!(c > 0.0)) throw invalid_parameter("scale factor must be positive");
        if (pump_) return from_pump(c * kappa_, c * pump_->mu, pump_->g);
        return from_epsilon(c * kappa_, c * epsilon_);
    }

private:
    ModelParams(double kappa, double epsilon, std::optional<PumpDrive> pump)
        : kappa_(kappa), epsilon_(epsilon), pump_(pump) {}

    double kappa_;
    double epsilon_;
    std::optional<PumpDrive> pump_;
};

enum class Regime { below_threshold, at_threshold, above_threshold };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::below_threshold: return "below_threshold";
        case Regime::at_threshold: return "at_threshold";
        case Regime::above_threshold: return "above_threshold";
    }
    return "unknown";
}

struct RegimeDescriptor {
    Regime regime;
    double margin;  // kappa - 2*epsilon, same units as kappa
};

inline constexpr double kThresholdRelTol = 1e-12;

inline RegimeDescriptor validate_regime(const ModelParams& p, double rel_tol = kThresholdRelTol) {
    const double margin = p.margin();
    if (std::abs(margin) <= rel_tol * p.kappa()) return {Regime::at_threshold, 0.0};
    return {margin > 0.0 ? Regime::below_threshold : Regime::above_threshold, margin};
}

inline bool is_below_threshold(const ModelParams& p) {
    return validate_regime(p).regime == Regime::below_threshold;
}

/// Throws regime_error unless strictly below threshold.
inline void require_below_threshold(const ModelParams& p, const char* what) {
    const auto r = validate_regime(p);
    if (r.regime != Regime::below_threshold) {
        throw regime_error(std::string(what) + " requires the below-threshold regime, got " + to_string(r.regime),
                           r.margin);
    }
}

/// kappa^2 - 4 epsilon^2, factored to avoid cancellation near threshold.
inline double threshold_denominator(const ModelParams& p) noexcept {
    return (p.kappa() - 2.0 * p.epsilon()) * (p.kappa() + 2.0 * p.epsilon());
}

}  // namespace subharmonic

#endif  // SUBHARMONIC_MODEL_HPP
