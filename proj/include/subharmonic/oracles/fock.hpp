#ifndef SUBHARMONIC_ORACLES_FOCK_HPP
#define SUBHARMONIC_ORACLES_FOCK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/numeric/odeint.hpp>

#include "subharmonic/errors.hpp"
#include "subharmonic/model.hpp"

namespace subharmonic::oracles {

enum class FockVariant {
    two_mode_first_order,  // H = i eps (a1 a2 - a1^dag a2^dag), damping kappa on a1 and a2
    single_mode_conventional,  // H = i (eps/2) (a^2 - a^dag^2), damping kappa on a
};

inline const char* to_string(FockVariant v) {
    return v == FockVariant::two_mode_first_order ? "two_mode_first_order" : "single_mode_conventional";
}

struct FockOptions {
    std::optional<unsigned> cutoff;  // fixed cutoff per mode; adaptive when empty
    unsigned initial_cutoff = 8;
    unsigned cutoff_step = 4;
    unsigned max_cutoff = 48;  // memory budget
    double tail_tol = 1e-10;
    double defect_tol = 1e-10;
    bool force_time_stepping = false;
};

/// Moments read off the truncated steady state.
///
/// For the single-mode variant n1 = <a^dag a>, n2 = 0, cross = <a^2>, and the
/// "total" mode is a itself.
struct FockMoments {
    double n1 = 0.0;
    double n2 = 0.0;
    double cross = 0.0;       // <a1 a2>
    double n_total = 0.0;     // <a^dag a>, a = a1 + a2
    double n_total_sq = 0.0;  // <(a^dag a)^2>
    double var_plus = 0.0;    // <(a + a^dag)^2>
    double var_minus = 0.0;   // <(i(a^dag - a))^2>

    double number_variance() const noexcept { return n_total_sq - n_total * n_total; }
};

struct FockSolution {
    FockVariant variant;
    unsigned cutoff;
    Eigen::MatrixXd populations;  // P(m, n); a single column for the single-mode variant
    FockMoments moments;
    double tail_mass;
    double residual;  // max-norm of the generator applied to the state
    double trace;
    double hermitian_defect;
    std::size_t unknowns;
    bool used_time_stepping;
};

namespace detail {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline SpMat annihilation(unsigned cutoff) {
    const int d = static_cast<int>(cutoff) + 1;
    SpMat a(d, d);
    std::vector<Triplet> t;
    for (int k = 1; k < d; ++k) t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

inline SpMat identity(int d) {
    SpMat id(d, d);
    id.setIdentity();
    return id;
}

inline SpMat kron(const SpMat& x, const SpMat& y) {
    SpMat out(x.rows() * y.rows(), x.cols() * y.cols());
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(x.nonZeros() * y.nonZeros()));
    for (int cx = 0; cx < x.outerSize(); ++cx) {
        for (SpMat::InnerIterator ix(x, cx); ix; ++ix) {
            for (int cy = 0; cy < y.outerSize(); ++cy) {
                for (SpMat::InnerIterator iy(y, cy); iy; ++iy) {
                    t.emplace_back(ix.row() * y.rows() + iy.row(), cx * y.cols() + cy, ix.value() * iy.value());
                }
            }
        }
    }
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

/// coeff * X rho Y
struct SuperTerm {
    const SpMat* left;
    const SpMat* right;
    double coeff;
};

/// Real Liouvillian restricted to density-matrix elements |i><j| whose
/// symmetry charges agree. The generator preserves that subspace; the
/// steady state lives in it.
class ReducedLiouvillian {
public:
    ReducedLiouvillian(std::vector<int> charge, const std::vector<SuperTerm>& terms) : charge_(std::move(charge)) {
        const int d = static_cast<int>(charge_.size());
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                if (charge_[i] == charge_[j]) {
                    index_.emplace(key(i, j), static_cast<int>(pairs_.size()));
                    pairs_.emplace_back(i, j);
                }
            }
        }
        build(terms);
    }

    const SpMat& matrix() const noexcept { return generator_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    const std::vector<std::pair<int, int>>& pairs() const noexcept { return pairs_; }

    std::optional<int> find(int i, int j) const {
        const auto it = index_.find(key(i, j));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Tr(O rho) for a state vector in this basis.
    double expectation(const SpMat& op, const Eigen::VectorXd& rho) const {
        double acc = 0.0;
        for (std::size_t idx = 0; idx < pairs_.size(); ++idx) {
            const auto [i, j] = pairs_[idx];
            const double o = op.coeff(j, i);
            if (o != 0.0) acc += o * rho[static_cast<Eigen::Index>(idx)];
        }
        return acc;
    }

    double trace(const Eigen::VectorXd& rho) const {
        double t = 0.0;
        for (std::size_t idx = 0; idx < pairs_.size(); ++idx) {
            if (pairs_[idx].first == pairs_[idx].second) t += rho[static_cast<Eigen::Index>(idx)];
        }
        return t;
    }

private:
    std::uint64_t key(int i, int j) const {
        return static_cast<std::uint64_t>(i) * charge_.size() + static_cast<std::uint64_t>(j);
    }

    void build(const std::vector<SuperTerm>& terms) {
        std::vector<Triplet> trip;
        for (const auto& term : terms) {
            // (X E_ij Y)_{kl} = X_{ki} Y_{jl}
            const SpMat yt = SpMat(term.right->transpose());
            for (std::size_t col = 0; col < pairs_.size(); ++col) {
                const auto [i, j] = pairs_[col];
                for (SpMat::InnerIterator xi(*term.left, i); xi; ++xi) {
                    for (SpMat::InnerIterator yj(yt, j); yj; ++yj) {
                        const auto row = find(static_cast<int>(xi.row()), static_cast<int>(yj.row()));
                        if (!row) throw std::logic_error("generator leaves the symmetry sector");
                        trip.emplace_back(*row, static_cast<int>(col), term.coeff * xi.value() * yj.value());
                    }
                }
            }
        }
        generator_.resize(static_cast<Eigen::Index>(pairs_.size()), static_cast<Eigen::Index>(pairs_.size()));
        generator_.setFromTriplets(trip.begin(), trip.end());
        generator_.makeCompressed();
    }

    std::vector<int> charge_;
    std::vector<std::pair<int, int>> pairs_;
    std::unordered_map<std::uint64_t, int> index_;
    SpMat generator_;
};

/// Operators of one truncated model instance.
struct FockModel {
    std::vector<int> charge;
    SpMat hamiltonian_real;  // -i H, real in the Fock basis
    std::vector<SpMat> jumps;
    std::vector<SpMat> jump_numbers;  // a^dag a per jump
    SpMat a1, a2, total;              // total = a1 + a2 (or a for one mode)
    SpMat id;
    int modes;
};

inline FockModel make_model(FockVariant variant, unsigned cutoff, double epsilon) {
    FockModel m;
    const SpMat a = annihilation(cutoff);
    const int d1 = static_cast<int>(cutoff) + 1;
    if (variant == FockVariant::two_mode_first_order) {
        m.modes = 2;
        const SpMat id1 = identity(d1);
        m.a1 = kron(a, id1);
        m.a2 = kron(id1, a);
        m.charge.resize(static_cast<std::size_t>(d1) * d1);
        for (int p = 0; p < d1; ++p)
            for (int q = 0; q < d1; ++q) m.charge[p * d1 + q] = p - q;
        const SpMat pair = m.a1 * m.a2;
        m.hamiltonian_real = epsilon * (pair - SpMat(pair.transpose()));
        m.jumps = {m.a1, m.a2};
        m.total = m.a1 + m.a2;
    } else {
        m.modes = 1;
        m.a1 = a;
        m.a2 = SpMat(d1, d1);
        m.charge.resize(d1);
        for (int p = 0; p < d1; ++p) m.charge[p] = p % 2;
        const SpMat sq = a * a;
        m.hamiltonian_real = 0.5 * epsilon * (sq - SpMat(sq.transpose()));
        m.jumps = {a};
        m.total = a;
    }
    for (const auto& j : m.jumps) m.jump_numbers.push_back(SpMat(j.transpose()) * j);
    m.id = identity(static_cast<int>(m.charge.size()));
    return m;
}

inline std::vector<SuperTerm> lindblad_terms(const FockModel& m, double kappa, std::vector<SpMat>& storage) {
    storage.clear();
    storage.reserve(m.jumps.size());  // terms hold pointers into storage
    // -i[H, rho] = G rho - rho G with G = -i H
    std::vector<SuperTerm> terms{{&m.hamiltonian_real, &m.id, 1.0}, {&m.id, &m.hamiltonian_real, -1.0}};
    for (std::size_t k = 0; k < m.jumps.size(); ++k) {
        storage.push_back(SpMat(m.jumps[k].transpose()));
        terms.push_back({&m.jumps[k], &storage.back(), kappa});
        terms.push_back({&m.jump_numbers[k], &m.id, -0.5 * kappa});
        terms.push_back({&m.id, &m.jump_numbers[k], -0.5 * kappa});
    }
    return terms;
}

inline double max_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline std::optional<Eigen::VectorXd> inverse_iteration(const ReducedLiouvillian& lv, const Eigen::VectorXd& start,
                                                        double shift, double tol) {
    const SpMat& gen = lv.matrix();
    SpMat shifted = gen;
    for (Eigen::Index k = 0; k < shifted.rows(); ++k) shifted.coeffRef(k, k) -= shift;
    shifted.makeCompressed();

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(shifted);
    lu.factorize(shifted);
    if (lu.info() != Eigen::Success) return std::nullopt;

    Eigen::VectorXd x = start;
    for (int it = 0; it < 12; ++it) {
        x = lu.solve(x);
        if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
        const double tr = lv.trace(x);
        if (tr == 0.0 || !std::isfinite(tr)) return std::nullopt;
        x /= tr;
        if (max_norm(gen * x) < tol) return x;
    }
    return std::nullopt;
}

inline Eigen::VectorXd time_step_to_steady(const ReducedLiouvillian& lv, Eigen::VectorXd x, double rate_scale,
                                           double tol) {
    namespace odeint = boost::numeric::odeint;
    using state = std::vector<double>;
    const SpMat& gen = lv.matrix();
    state s(x.data(), x.data() + x.size());
    auto rhs = [&gen](const state& in, state& out, double) {
        out.resize(in.size());
        Eigen::Map<const Eigen::VectorXd> vin(in.data(), static_cast<Eigen::Index>(in.size()));
        Eigen::Map<Eigen::VectorXd> vout(out.data(), static_cast<Eigen::Index>(out.size()));
        vout = gen * vin;
    };
    auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<state>());
    const double chunk = 1.0 / rate_scale;
    double t = 0.0;
    double defect = 0.0;
    for (int k = 0; k < 20000; ++k) {
        odeint::integrate_adaptive(stepper, rhs, s, t, t + chunk, 0.01 * chunk);
        t += chunk;
        Eigen::Map<Eigen::VectorXd> v(s.data(), static_cast<Eigen::Index>(s.size()));
        v /= lv.trace(v);
        defect = max_norm(gen * v);
        if (defect < tol) return v;
    }
    throw convergence_error("Fock time stepping did not reach the steady state", defect);
}

inline FockSolution solve_at_cutoff(const ModelParams& p, FockVariant variant, unsigned cutoff,
                                    const FockOptions& opt) {
    const FockModel model = make_model(variant, cutoff, p.epsilon());
    std::vector<SpMat> storage;
    const auto terms = lindblad_terms(model, p.kappa(), storage);
    const ReducedLiouvillian lv(model.charge, terms);

    Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lv.size()));
    start[*lv.find(0, 0)] = 1.0;

    std::optional<Eigen::VectorXd> rho;
    if (!opt.force_time_stepping) rho = inverse_iteration(lv, start, -1e-7 * p.kappa(), opt.defect_tol);
    const bool stepped = !rho.has_value();
    if (stepped) rho = time_step_to_steady(lv, start, p.kappa(), opt.defect_tol);
    const Eigen::VectorXd& x = *rho;

    FockSolution sol;
    sol.variant = variant;
    sol.cutoff = cutoff;
    sol.unknowns = lv.size();
    sol.used_time_stepping = stepped;
    sol.trace = lv.trace(x);
    sol.residual = max_norm(lv.matrix() * x);

    double herm = 0.0;
    for (std::size_t idx = 0; idx < lv.size(); ++idx) {
        const auto [i, j] = lv.pairs()[idx];
        herm = std::max(herm, std::abs(x[static_cast<Eigen::Index>(idx)] - x[*lv.find(j, i)]));
    }
    sol.hermitian_defect = herm;

    const int w = static_cast<int>(cutoff) + 1;
    std::vector<double> shells(w, 0.0);
    if (model.modes == 2) {
        sol.populations.resize(w, w);
        for (int m = 0; m < w; ++m)
            for (int n = 0; n < w; ++n) {
                const double pmn = x[*lv.find(m * w + n, m * w + n)];
                sol.populations(m, n) = pmn;
                shells[std::max(m, n)] += pmn;
            }
    } else {
        sol.populations.resize(w, 1);
        for (int m = 0; m < w; ++m) {
            sol.populations(m, 0) = x[*lv.find(m, m)];
            shells[m] = sol.populations(m, 0);
        }
    }

    // Mass at and beyond the last two shells, extrapolated geometrically.
    const double last = shells[w - 1] + shells[w - 2];
    const double prev = w >= 4 ? shells[w - 3] + shells[w - 4] : 1.0;
    const double ratio = prev > 0.0 ? std::clamp(last / prev, 0.0, 0.99) : 0.99;
    sol.tail_mass = std::max(0.0, last) / (1.0 - ratio);

    const SpMat td = SpMat(model.total.transpose());
    const SpMat n_tot = td * model.total;
    const SpMat plus = model.total + td;
    const SpMat minus = td - model.total;  // a_- = i * minus
    FockMoments& mom = sol.moments;
    mom.n1 = lv.expectation(SpMat(SpMat(model.a1.transpose()) * model.a1), x);
    mom.n2 = model.modes == 2 ? lv.expectation(SpMat(SpMat(model.a2.transpose()) * model.a2), x) : 0.0;
    mom.cross = model.modes == 2 ? lv.expectation(SpMat(model.a1 * model.a2), x)
                                 : lv.expectation(SpMat(model.a1 * model.a1), x);
    mom.n_total = lv.expectation(n_tot, x);
    mom.n_total_sq = lv.expectation(SpMat(n_tot * n_tot), x);
    mom.var_plus = lv.expectation(SpMat(plus * plus), x);
    mom.var_minus = -lv.expectation(SpMat(minus * minus), x);
    return sol;
}

}  // namespace detail

/// Steady state of the truncated Lindblad generator with the pump replaced by
/// its classical amplitude. With no fixed cutoff, the cutoff grows until the
/// estimated tail mass drops below `tail_tol`.
inline FockSolution fock_steady_state(const ModelParams& p, FockVariant variant, const FockOptions& opt = {}) {
    require_below_threshold(p, "fock_steady_state");
    if (opt.cutoff) {
        if (*opt.cutoff < 4) throw invalid_parameter("Fock cutoff must be at least 4");
        if (*opt.cutoff > opt.max_cutoff) {
            throw budget_error("Fock cutoff " + std::to_string(*opt.cutoff) + " exceeds the budget of " +
                               std::to_string(opt.max_cutoff) + "; use a smaller epsilon/kappa");
        }
        return detail::solve_at_cutoff(p, variant, *opt.cutoff, opt);
    }
    // Grow the cutoff; once two tail estimates exist, jump to the cutoff their
    // geometric decay predicts.
    unsigned n = std::max(4u, opt.initial_cutoff);
    std::optional<std::pair<unsigned, double>> previous;
    while (true) {
        if (n > opt.max_cutoff) {
            throw budget_error("adaptive Fock cutoff exceeds the budget of " + std::to_string(opt.max_cutoff) +
                               "; use a smaller epsilon/kappa");
        }
        auto sol = detail::solve_at_cutoff(p, variant, n, opt);
        if (sol.tail_mass < opt.tail_tol) return sol;
        unsigned next = n + opt.cutoff_step;
        if (previous && sol.tail_mass > 0.0 && previous->second > sol.tail_mass) {
            const double per_level = std::log(sol.tail_mass / previous->second) / (double(n) - previous->first);
            const double more = std::ceil(std::log(opt.tail_tol / sol.tail_mass) / per_level) + 1.0;
            if (std::isfinite(more) && more > 0.0) {
                next = std::max(next, n + static_cast<unsigned>(std::min(more, double(opt.max_cutoff) + 1.0)));
            }
        }
        previous = {n, sol.tail_mass};
        n = n < opt.max_cutoff ? std::min(next, opt.max_cutoff) : opt.max_cutoff + 1;
    }
}

}  // namespace subharmonic::oracles

#endif  // SUBHARMONIC_ORACLES_FOCK_HPP
