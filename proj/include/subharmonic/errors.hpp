#ifndef SUBHARMONIC_ERRORS_HPP
#define SUBHARMONIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace subharmonic {

/// Parameter outside its physical domain (non-positive kappa, negative pump, ...).
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A quantity was requested outside the regime where it exists.
/// Carries the threshold margin kappa - 2*epsilon.
class regime_error : public std::domain_error {
public:
    regime_error(const std::string& what, double margin)
        : std::domain_error(what + " (threshold margin kappa - 2*epsilon = " + std::to_string(margin) + ")"),
          margin_(margin) {}

    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

/// The minus-quadrature variance diverges at and above threshold.
class divergence_error : public regime_error {
public:
    using regime_error::regime_error;
};

/// Ratio of two vanishing window integrals (local squeezing at zero half-width).
class indeterminate_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative oracle did not reach its tolerance.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double defect)
        : std::runtime_error(what + " (defect " + std::to_string(defect) + ")"), defect_(defect) {}

    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

/// Fock cutoff needed exceeds the configured budget.
class budget_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace subharmonic

#endif  // SUBHARMONIC_ERRORS_HPP
