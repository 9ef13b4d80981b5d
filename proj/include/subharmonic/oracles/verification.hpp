#ifndef SUBHARMONIC_ORACLES_VERIFICATION_HPP
#define SUBHARMONIC_ORACLES_VERIFICATION_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "subharmonic/closed_form.hpp"
#include "subharmonic/oracles/fock.hpp"
#include "subharmonic/oracles/moment_ode.hpp"
#include "subharmonic/oracles/q_sampler.hpp"
#include "subharmonic/oracles/quadrature.hpp"
#include "subharmonic/qfunc.hpp"
#include "subharmonic/squeezing.hpp"

namespace subharmonic::oracles {

enum class ToleranceKind { absolute, relative };

struct CheckResult {
    std::string name;
    double computed;
    double expected;
    double tolerance;
    ToleranceKind kind;
    bool passed;
};

inline CheckResult make_check(std::string name, double computed, double expected, double tol,
                              ToleranceKind kind = ToleranceKind::absolute) {
    const double err = std::abs(computed - expected);
    const double bound = kind == ToleranceKind::relative ? tol * std::abs(expected) : tol;
    return {std::move(name), computed, expected, tol, kind, std::isfinite(computed) && err <= bound};
}

/// Relative comparison that falls back to an absolute floor for tiny values.
inline CheckResult make_probability_check(std::string name, double computed, double expected) {
    if (std::abs(expected) < 1e-4) return make_check(std::move(name), computed, expected, 1e-8);
    return make_check(std::move(name), computed, expected, 1e-6, ToleranceKind::relative);
}

inline void to_json(nlohmann::json& j, const CheckResult& c) {
    j = nlohmann::json{{"name", c.name},
                       {"computed", c.computed},
                       {"expected", c.expected},
                       {"tolerance", c.tolerance},
                       {"tolerance_kind", c.kind == ToleranceKind::relative ? "relative" : "absolute"},
                       {"pass", c.passed}};
}

struct VerifyOptions {
    bool include_fock = true;
    std::uint64_t seed = 20240611;
    std::uint64_t samples = 1'000'000;
};

/// Fock oracle versus every closed form at (kappa = 1, epsilon).
inline void append_fock_checks(std::vector<CheckResult>& out, double epsilon) {
    const auto p = ModelParams::from_epsilon(1.0, epsilon);
    const auto sol = fock_steady_state(p, FockVariant::two_mode_first_order);
    const auto q = q_params(p);
    const auto sm = steady_moments(p);
    const auto qv = quadrature_variances(p);
    const std::string tag = "fock[eps/kappa=" + std::to_string(epsilon).substr(0, 3) + "].";
    using K = ToleranceKind;
    out.push_back(make_check(tag + "mean_photon_number", sol.moments.n_total, mean_photon_number(p), 1e-6, K::relative));
    out.push_back(make_check(tag + "photon_number_variance", sol.moments.number_variance(), photon_number_variance(p),
                             1e-6, K::relative));
    out.push_back(make_check(tag + "cross_moment", sol.moments.cross, sm.cross, 1e-6, K::relative));
    out.push_back(make_check(tag + "var_plus", sol.moments.var_plus, qv.var_plus, 1e-6, K::relative));
    out.push_back(make_check(tag + "var_minus", sol.moments.var_minus, qv.minus(), 1e-6, K::relative));
    out.push_back(make_probability_check(tag + "P(0,0)", sol.populations(0, 0), joint_photon_distribution(q, 0, 0)));
    out.push_back(make_probability_check(tag + "P(1,1)", sol.populations(1, 1), joint_photon_distribution(q, 1, 1)));
    out.push_back(make_probability_check(tag + "P(1,0)", sol.populations(1, 0), joint_photon_distribution(q, 1, 0)));
    out.push_back(make_check(tag + "trace", sol.trace, 1.0, 1e-10));
    out.push_back(make_check(tag + "hermitian_defect", sol.hermitian_defect, 0.0, 1e-10));
}

inline std::vector<CheckResult> run_verification(const VerifyOptions& opt = {}) {
    using K = ToleranceKind;
    std::vector<CheckResult> out;

    const auto thr = ModelParams::from_epsilon(0.8, 0.4);
    out.push_back(make_check("global_squeezing[kappa=0.8,eps=0.4]", global_squeezing(thr), 0.5, 1e-12));
    out.push_back(make_check("output_squeezing[kappa=0.8,eps=0.4]", output_squeezing(thr), 0.4, 1e-12));
    out.push_back(make_check("local_squeezing[kappa=0.8,eps=0.4,half_width=0.05]", local_squeezing(thr, 0.05), 0.749,
                             1e-3));

    const auto p = ModelParams::from_epsilon(1.0, 0.2);
    const auto sm = steady_moments(p);
    out.push_back(make_check("factor_two[closed_form]", mean_photon_number(p) / conventional_mean_photon_number(p), 2.0,
                             1e-13, K::relative));

    // Moment hierarchy integrated from vacuum.
    const auto ode = integrate_moments(p, MomentState{}, 500.0, 1e-12);
    out.push_back(make_check("moment_ode.n1", ode.n1, sm.n1, 1e-8));
    out.push_back(make_check("moment_ode.n2", ode.n2, sm.n2, 1e-8));
    out.push_back(make_check("moment_ode.cross", ode.c.real(), sm.cross, 1e-8));
    const auto [rate_plus, rate_minus] = fitted_quadrature_decay_rates(p);
    out.push_back(make_check("moment_ode.decay_rate_plus", rate_plus, 0.5 * p.kappa() + p.epsilon(), 1e-8));
    out.push_back(make_check("moment_ode.decay_rate_minus", rate_minus, 0.5 * p.kappa() - p.epsilon(), 1e-8));

    // Photon-number distribution normalization and marginal mean.
    for (double e : {0.1, 0.2, 0.3, 0.4}) {
        const auto pe = ModelParams::from_epsilon(1.0, e);
        const auto q = q_params(pe);
        const unsigned n = adaptive_cutoff(q);
        const auto table = joint_distribution_table(q, n);
        double sum = 0.0, mean = 0.0;
        for (unsigned i = 0; i <= n; ++i)
            for (unsigned j = 0; j <= n; ++j) {
                sum += table[i * (n + 1) + j];
                mean += i * table[i * (n + 1) + j];
            }
        const std::string tag = "distribution[eps/kappa=" + std::to_string(e).substr(0, 3) + "].";
        out.push_back(make_check(tag + "normalization", sum, 1.0, 1e-8));
        out.push_back(make_check(tag + "marginal_mean", mean, steady_moments(pe).n1, 1e-8));
    }

    const auto q = q_params(p);
    out.push_back(make_check("q_quadrature.normalization", integrate_q(q), 1.0, 1e-6));

    const auto samples = sample_q(q, opt.samples, opt.seed);
    out.push_back(make_check("q_sampler.mean_abs1_sq", samples.mean_abs1_sq, sm.n1 + 1.0, 0.005));
    out.push_back(make_check("q_sampler.mean_re_a1a2", samples.mean_a1a2.real(), sm.cross, 0.005));

    for (auto [k, e] : {std::pair{1.0, 0.2}, std::pair{1.0, 0.0}, std::pair{0.8, 0.4}, std::pair{2.0, 0.9}}) {
        const auto pe = ModelParams::from_epsilon(k, e);
        out.push_back(make_check("spectrum_sum_rule[kappa=" + std::to_string(k).substr(0, 3) + ",eps=" +
                                     std::to_string(e).substr(0, 3) + "]",
                                 spectrum_sum_rule_check(pe), 0.0, 1e-6));
    }

    const auto qv = quadrature_variances(p);
    const double k2 = p.kappa() * p.kappa();
    out.push_back(make_check("uncertainty_product", qv.var_plus * qv.minus(), 4.0 * k2 / threshold_denominator(p),
                             1e-12, K::relative));

    if (opt.include_fock) {
        for (double e : {0.1, 0.2, 0.3, 0.4}) append_fock_checks(out, e);
        const auto two = fock_steady_state(p, FockVariant::two_mode_first_order);
        const auto one = fock_steady_state(p, FockVariant::single_mode_conventional);
        out.push_back(make_check("factor_two[fock]", two.moments.n_total / one.moments.n1, 2.0, 1e-5, K::relative));
        out.push_back(make_check("fock_single_mode.mean_photon_number", one.moments.n1, conventional_mean_photon_number(p),
                                 1e-6, K::relative));
    }
    return out;
}

inline bool all_passed(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

inline nlohmann::json verification_report(const std::vector<CheckResult>& checks) {
    nlohmann::json j;
    j["checks"] = checks;
    j["passed"] = all_passed(checks);
    std::size_t failures = 0;
    for (const auto& c : checks) failures += c.passed ? 0 : 1;
    j["failures"] = failures;
    return j;
}

}  // namespace subharmonic::oracles

#endif  // SUBHARMONIC_ORACLES_VERIFICATION_HPP
