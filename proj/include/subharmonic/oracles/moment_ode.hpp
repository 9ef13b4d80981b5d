#ifndef SUBHARMONIC_ORACLES_MOMENT_ODE_HPP
#define SUBHARMONIC_ORACLES_MOMENT_ODE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "subharmonic/errors.hpp"
#include "subharmonic/model.hpp"

namespace subharmonic::oracles {

/// First and second moments evolved by the closed moment hierarchy with the
/// pump replaced by its classical steady state.
struct MomentState {
    std::complex<double> m1{};     // <a1>
    std::complex<double> m2{};     // <a2>
    double n1 = 0.0;               // <a1^dag a1>
    double n2 = 0.0;               // <a2^dag a2>
    std::complex<double> c{};      // <a1 a2>
    std::complex<double> c_dag{};  // <a1^dag a2^dag>
    double t = 0.0;
};

/// Rates for the hierarchy. The two damping constants are kept distinct so the
/// symmetric reduction can be checked.
struct MomentRates {
    double kappa1;
    double kappa2;
    double epsilon;

    static MomentRates symmetric(const ModelParams& p) { return {p.kappa(), p.kappa(), p.epsilon()}; }
};

namespace detail {

using ode_state = std::array<double, 10>;

inline ode_state pack(const MomentState& s) {
    return {s.m1.real(), s.m1.imag(), s.m2.real(), s.m2.imag(), s.n1, s.n2,
            s.c.real(),  s.c.imag(),  s.c_dag.real(), s.c_dag.imag()};
}

inline MomentState unpack(const ode_state& x, double t) {
    MomentState s;
    s.m1 = {x[0], x[1]};
    s.m2 = {x[2], x[3]};
    s.n1 = x[4];
    s.n2 = x[5];
    s.c = {x[6], x[7]};
    s.c_dag = {x[8], x[9]};
    s.t = t;
    return s;
}

struct MomentRhs {
    MomentRates r;

    void operator()(const ode_state& x, ode_state& dxdt, double /*t*/) const {
        const std::complex<double> m1{x[0], x[1]}, m2{x[2], x[3]};
        const std::complex<double> c{x[6], x[7]}, cd{x[8], x[9]};
        const double h1 = 0.5 * r.kappa1, h2 = 0.5 * r.kappa2, hs = 0.5 * (r.kappa1 + r.kappa2);

        const auto dm1 = -h1 * m1 - r.epsilon * std::conj(m2);
        const auto dm2 = -h2 * m2 - r.epsilon * std::conj(m1);
        const double dn1 = -r.kappa1 * x[4] - r.epsilon * (c + cd).real();
        const double dn2 = -r.kappa2 * x[5] - r.epsilon * (c + cd).real();
        const auto dc = -hs * c - r.epsilon * (x[4] + x[5] + 1.0);
        const auto dcd = -hs * cd - r.epsilon * (x[4] + x[5] + 1.0);

        dxdt = {dm1.real(), dm1.imag(), dm2.real(), dm2.imag(), dn1, dn2,
                dc.real(),  dc.imag(),  dcd.real(), dcd.imag()};
    }
};

inline double inf_norm(const ode_state& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline auto make_stepper(double rel_tol) {
    namespace odeint = boost::numeric::odeint;
    return odeint::make_controlled(rel_tol * 1e-2, rel_tol * 1e-2, odeint::runge_kutta_dopri5<ode_state>());
}

}  // namespace detail

/// Time derivative of a moment state; it vanishes at a steady state.
inline MomentState moment_derivative(const MomentRates& rates, const MomentState& s) {
    detail::ode_state dx{};
    detail::MomentRhs{rates}(detail::pack(s), dx, s.t);
    return detail::unpack(dx, s.t);
}

/// Integrates from `initial` until the derivative norm drops below
/// tol * max(1, |state|) or `horizon` is reached.
inline MomentState integrate_moments(const MomentRates& rates, const MomentState& initial, double horizon,
                                     double tol = 1e-10) {
    namespace odeint = boost::numeric::odeint;
    if (!(rates.kappa1 > 0.0) || !(rates.kappa2 > 0.0)) throw invalid_parameter("damping rates must be positive");

    const detail::MomentRhs rhs{rates};
    auto x = detail::pack(initial);
    double t = initial.t;
    const double chunk = 1.0 / std::min(rates.kappa1, rates.kappa2);
    const double t_end = initial.t + horizon;
    constexpr double kDivergence = 1e12;

    detail::ode_state dx{};
    while (true) {
        rhs(x, dx, t);
        const double defect = detail::inf_norm(dx);
        const double scale = std::max(1.0, detail::inf_norm(x));
        if (defect < tol * scale) return detail::unpack(x, t);
        if (!std::isfinite(scale) || scale > kDivergence) {
            throw divergence_error("moment hierarchy diverges", 0.5 * (rates.kappa1 + rates.kappa2) - 2.0 * rates.epsilon);
        }
        if (t >= t_end) throw convergence_error("moment hierarchy did not settle within the horizon", defect);
        const double t_next = std::min(t + chunk, t_end);
        odeint::integrate_adaptive(detail::make_stepper(tol), rhs, x, t, t_next, 0.01 * chunk);
        t = t_next;
    }
}

inline MomentState integrate_moments(const ModelParams& p, const MomentState& initial, double horizon,
                                     double tol = 1e-10) {
    return integrate_moments(MomentRates::symmetric(p), initial, horizon, tol);
}

/// Trajectory sampled at the given times (ascending, first >= initial.t).
inline std::vector<MomentState> sample_moments(const MomentRates& rates, const MomentState& initial,
                                               const std::vector<double>& times, double rel_tol = 1e-12) {
    namespace odeint = boost::numeric::odeint;
    std::vector<MomentState> out;
    out.reserve(times.size() + 1);
    auto x = detail::pack(initial);
    std::vector<double> grid;
    grid.reserve(times.size() + 1);
    grid.push_back(initial.t);
    grid.insert(grid.end(), times.begin(), times.end());
    // integrate_times also reports the start point; it is skipped.
    odeint::integrate_times(detail::make_stepper(rel_tol), detail::MomentRhs{rates}, x, grid.begin(), grid.end(),
                            1e-3, [&](const detail::ode_state& s, double t) { out.push_back(detail::unpack(s, t)); });
    out.erase(out.begin());
    return out;
}

/// Decay rates of <a_+> and <a_-> for a = a1 + a2, fitted by least squares on
/// log|<a_pm>(t)| starting from a displaced state.
inline std::pair<double, double> fitted_quadrature_decay_rates(const ModelParams& p, double duration = 4.0,
                                                               int points = 41) {
    require_below_threshold(p, "fitted_quadrature_decay_rates");
    MomentState init;
    init.m1 = {1.0, 1.0};
    std::vector<double> times;
    for (int i = 1; i <= points; ++i) times.push_back(duration * i / points / p.kappa());
    const auto traj = sample_moments(MomentRates::symmetric(p), init, times);

    auto fit = [&](auto quadrature) {
        double st = 0, sy = 0, stt = 0, sty = 0;
        const double n = static_cast<double>(traj.size());
        for (const auto& s : traj) {
            const double y = std::log(std::abs(quadrature(s.m1 + s.m2)));
            st += s.t;
            sy += y;
            stt += s.t * s.t;
            sty += s.t * y;
        }
        return -(n * sty - st * sy) / (n * stt - st * st);
    };
    // <a_+> = 2 Re<a>, <a_-> = 2 Im<a>
    const double plus = fit([](std::complex<double> a) { return 2.0 * a.real(); });
    const double minus = fit([](std::complex<double> a) { return 2.0 * a.imag(); });
    return {plus, minus};
}

}  // namespace subharmonic::oracles

#endif  // SUBHARMONIC_ORACLES_MOMENT_ODE_HPP
