#include <catch_amalgamated.hpp>

#include "subharmonic/closed_form.hpp"
#include "test_support.hpp"

using namespace subharmonic;
using Catch::Approx;
using test_support::rel_err;

// Expected values for (kappa = 1, epsilon = 0.2) are exact rationals:
// kappa^2 - 4 eps^2 = 21/25, n1 = 2/21, cross = -5/21, n-bar = 4/21,
// variance = 8/21 + 16/441 + 100/441 = 284/441.

TEST_CASE("steady_moments examples") {
    const auto m = steady_moments(ModelParams::from_epsilon(1.0, 0.2));
    CHECK(m.n1 == Approx(2.0 / 21.0).epsilon(1e-14));
    CHECK(m.n2 == m.n1);
    CHECK(m.cross == Approx(-5.0 / 21.0).epsilon(1e-14));
    CHECK(m.first_moments_zero);
    CHECK(m.vanishing_moments_zero);

    const auto vac = steady_moments(ModelParams::from_epsilon(1.0, 0.0));
    CHECK(vac.n1 == 0.0);
    CHECK(vac.n2 == 0.0);
    CHECK(vac.cross == 0.0);

    const auto same_ratio = steady_moments(ModelParams::from_epsilon(2.0, 0.4));
    CHECK(same_ratio.n1 == Approx(0.32 / 3.36).epsilon(1e-14));
    CHECK(same_ratio.n1 == Approx(m.n1).epsilon(1e-14));
}

TEST_CASE("closed forms refuse to evaluate at or above threshold") {
    for (auto p : {ModelParams::from_epsilon(0.8, 0.4), ModelParams::from_epsilon(0.8, 0.5)}) {
        CHECK_THROWS_AS(steady_moments(p), regime_error);
        CHECK_THROWS_AS(mean_photon_number(p), regime_error);
        CHECK_THROWS_AS(photon_number_variance(p), regime_error);
        CHECK_THROWS_AS(conventional_mean_photon_number(p), regime_error);
    }
    CHECK_THROWS_AS(pump_mean_photon_number(ModelParams::from_pump(0.8, 0.5, 0.8)), regime_error);
}

TEST_CASE("mean photon number and variance examples") {
    const auto p = ModelParams::from_epsilon(1.0, 0.2);
    CHECK(mean_photon_number(p) == Approx(4.0 / 21.0).epsilon(1e-14));
    CHECK(photon_number_variance(p) == Approx(284.0 / 441.0).epsilon(1e-14));
    CHECK(photon_number_variance(p) == Approx(0.6439909297052154).epsilon(1e-14));

    const auto m = steady_moments(p);
    const double nbar = mean_photon_number(p);
    CHECK(2.0 * nbar + nbar * nbar + 4.0 * m.cross * m.cross == Approx(photon_number_variance(p)).epsilon(1e-14));

    const auto vac = ModelParams::from_epsilon(1.0, 0.0);
    CHECK(mean_photon_number(vac) == 0.0);
    CHECK(photon_number_variance(vac) == 0.0);
    CHECK_FALSE(photon_statistics(vac).fano.has_value());
    const auto stats = photon_statistics(p);
    REQUIRE(stats.fano);
    CHECK(*stats.fano == Approx((284.0 / 441.0) / (4.0 / 21.0)));
    CHECK(*stats.fano > 1.0);
}

TEST_CASE("conventional Hamiltonian gives half the mean photon number") {
    const auto p = ModelParams::from_epsilon(1.0, 0.2);
    CHECK(conventional_mean_photon_number(p) == Approx(2.0 / 21.0).epsilon(1e-14));
    CHECK(conventional_mean_photon_number(ModelParams::from_epsilon(1.0, 0.0)) == 0.0);
    for (const auto& q : test_support::random_below_threshold(200, 7)) {
        CHECK(rel_err(mean_photon_number(q), 2.0 * conventional_mean_photon_number(q)) <= 1e-14);
    }
}

TEST_CASE("pump mean photon number") {
    const auto p = ModelParams::from_pump(1.0, 1.0, 0.1);
    REQUIRE(p.epsilon() == Approx(0.2));
    const auto r = pump_mean_photon_number(p);
    CHECK(r.value == Approx(4.0 - 2.0 / 21.0).epsilon(1e-14));
    CHECK(r.value == Approx(4.0 * 1.0 / 1.0 - steady_moments(p).n1).epsilon(1e-15));
    CHECK_FALSE(r.depletion_warning);

    CHECK(pump_mean_photon_number(ModelParams::from_pump(1.0, 1.0, 0.0)).value == 4.0);
    CHECK_THROWS_AS(pump_mean_photon_number(ModelParams::from_epsilon(1.0, 0.2)), invalid_parameter);

    // weak drive, strong coupling: the estimate goes negative
    const auto depleted = pump_mean_photon_number(ModelParams::from_pump(1.0, 0.1, 2.0));
    CHECK(depleted.value < 0.0);
    CHECK(depleted.depletion_warning);
}

TEST_CASE("closed-form invariants over random below-threshold parameters") {
    const auto params = test_support::random_below_threshold(500, 2024);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> scale(0.05, 20.0);
    for (const auto& p : params) {
        const auto m = steady_moments(p);
        const double nbar = mean_photon_number(p);
        const double var = photon_number_variance(p);
        CHECK(m.n1 == m.n2);
        CHECK(m.cross <= 0.0);
        CHECK(nbar >= 0.0);
        CHECK(var >= 2.0 * nbar);
        CHECK(rel_err(var, 2.0 * nbar + nbar * nbar + 4.0 * m.cross * m.cross) <= 1e-13);
        CHECK(rel_err(nbar, m.n1 + m.n2) <= 1e-15);

        const auto s = p.scaled(scale(rng));
        const auto ms = steady_moments(s);
        CHECK(ms.n1 == Approx(m.n1).epsilon(1e-12).margin(1e-300));
        CHECK(ms.cross == Approx(m.cross).epsilon(1e-12).margin(1e-300));
        CHECK(photon_number_variance(s) == Approx(var).epsilon(1e-12).margin(1e-300));
    }
}

TEST_CASE("moments stay accurate close to threshold") {
    const double gap = 1e-10;
    const auto p = ModelParams::from_epsilon(1.0, 0.5 - gap / 2.0);
    // kappa^2 - 4 eps^2 = gap (2 - gap)
    const double d = gap * (2.0 - gap);
    const double e = 0.5 - gap / 2.0;
    CHECK(steady_moments(p).n1 == Approx(2.0 * e * e / d).epsilon(1e-5));
}
