#include <cmath>
#include <numbers>
#include <random>

#include "cslrot/errors.hpp"
#include "cslrot/geometry.hpp"
#include "cslrot/presets.hpp"
#include "doctest.h"

using namespace cslrot;
constexpr double kPi = std::numbers::pi;

namespace {

struct MassMoments {
    double mass, inertia;
};

// Uniform samples over the bounding cylinder.
MassMoments monte_carlo(const MassModel& model, long samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double R = outer_radius(model), h = height_of(model);
    double volume = kPi * R * R * h;
    double m = 0.0, i = 0.0;
    for (long k = 0; k < samples; ++k) {
        double r = R * std::sqrt(u(rng));
        double rho = density_at(model, r, 2.0 * kPi * u(rng));
        m += rho;
        i += rho * r * r;
    }
    return {m * volume / samples, i * volume / samples};
}

PeriodicAnnulus table1_row1() { return std::get<PeriodicAnnulus>(find_preset("table1_rc1e-4").model); }

}  // namespace

TEST_CASE("closed-form inertia of the simple shapes") {
    CHECK(moment_of_inertia(HomogeneousDisk{1.0, 1.0, 1.0}) == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(moment_of_inertia(HalfCylinder{0.0, 1.0, 1.0, 1.0}) == doctest::Approx(kPi / 4).epsilon(1e-15));
}

TEST_CASE("annulus inertia against Monte Carlo integration") {
    PeriodicAnnulus a = table1_row1();
    MassMoments mc = monte_carlo(a, 10'000'000, 1);
    CHECK(mc.inertia == doctest::Approx(moment_of_inertia(a)).epsilon(1e-3));
}

TEST_CASE("Monte Carlo mass of each variant") {
    std::vector<MassModel> models{HomogeneousDisk{2.0e3, 0.02, 1e-3}, table1_row1(), find_preset("lee2020").model,
                                  HalfCylinder{1.2e3, 19.3e3, 0.01, 2e-3}};
    std::uint64_t seed = 3;
    for (const auto& m : models) {
        INFO(kind_name(m));
        CHECK(monte_carlo(m, 4'000'000, seed++).mass == doctest::Approx(total_mass(m)).epsilon(2e-3));
    }
}

TEST_CASE("inertia is additive over the components of a two-ring disk") {
    auto t = std::get<TwoAnnuli>(find_preset("lee2020").model);
    double base = moment_of_inertia(HomogeneousDisk{t.rho, t.r_outer_total, t.height}) -
                  moment_of_inertia(HomogeneousDisk{t.rho, t.r_core, t.height});
    auto ring = [&](const SectorRing& s) {
        return moment_of_inertia(PeriodicAnnulus{0.0, t.delta_rho, s.r_inner, s.r_outer, s.n_sectors,
                                                 kPi / s.n_sectors, t.height});
    };
    CHECK(moment_of_inertia(t) == doctest::Approx(base + ring(t.inner) + ring(t.outer)).epsilon(1e-13));
}

TEST_CASE("inner-radius solver") {
    SUBCASE("homogeneous limit") {
        double r = solve_inner_radius(9e-6, 1.2e3, 0.0, 100, 5e-3, 2.0, 1e-3);
        CHECK(r == doctest::Approx(std::pow(2.0 * 9e-6 / (kPi * 1.2e3 * 1e-3 * 16.0), 0.25)).epsilon(1e-14));
    }
    SUBCASE("bisection oracle on the Table I row") {
        auto inertia_at = [](double r) {
            return moment_of_inertia(PeriodicAnnulus{1.2e3, 19.3e3, r, 2.0 * r, 100, 5e-3, 1e-3});
        };
        double lo = 1e-4, hi = 1.0;
        for (int k = 0; k < 200; ++k) {
            double mid = 0.5 * (lo + hi);
            (inertia_at(mid) < 9e-6 ? lo : hi) = mid;
        }
        CHECK(solve_inner_radius(9e-6, 1.2e3, 19.3e3, 100, 5e-3, 2.0, 1e-3) ==
              doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
    }
    SUBCASE("scaling with the target") {
        double r1 = solve_inner_radius(9e-6, 1.2e3, 19.3e3, 4, 3e-5, 2.0, 6e-3);
        double r2 = solve_inner_radius(18e-6, 1.2e3, 19.3e3, 4, 3e-5, 2.0, 6e-3);
        CHECK(r2 / r1 == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-14));
    }
    SUBCASE("round trip") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 200; ++k) {
            int n = 1 + static_cast<int>(u(rng) * 300);
            double alpha = u(rng) * 2.0 * kPi / n;
            double eps = 1.01 + 30.0 * u(rng);
            double h = std::pow(10.0, -5.0 + 4.0 * u(rng));
            double target = std::pow(10.0, -8.0 + 4.0 * u(rng));
            double r = solve_inner_radius(target, 1.2e3, 19.3e3, n, alpha, eps, h);
            double back = moment_of_inertia(PeriodicAnnulus{1.2e3, 19.3e3, r, eps * r, n, alpha, h});
            CHECK(back == doctest::Approx(target).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(solve_inner_radius(-1.0, 1.2e3, 19.3e3, 4, 0.1, 2.0, 1e-3), InvalidGeometry);
    CHECK_THROWS_AS(solve_inner_radius(1e-6, 1.2e3, 19.3e3, 4, 0.1, 1.0, 1e-3), InvalidGeometry);
    CHECK_THROWS_AS(solve_inner_radius(1e-6, 0.0, 0.0, 4, 0.1, 2.0, 1e-3), InvalidGeometry);
}

TEST_CASE("density_at") {
    PeriodicAnnulus a{1.2e3, 19.3e3, 0.01, 0.02, 10, 0.2, 1e-3};
    CHECK(density_at(a, 0.015, 0.1) == 1.2e3 + 19.3e3);
    CHECK(density_at(a, 0.015, 2.0 * kPi / 10 + 0.1) == 1.2e3 + 19.3e3);
    CHECK(density_at(a, 0.015, 0.2 + 1e-9) == 1.2e3);
    CHECK(density_at(a, 0.005, 0.1) == 1.2e3);
    CHECK(density_at(a, 0.025, 0.1) == 0.0);
    CHECK(density_at(a, 0.015, 0.1 - 2.0 * kPi) == density_at(a, 0.015, 0.1));

    auto t = std::get<TwoAnnuli>(find_preset("lee2020").model);
    CHECK(density_at(t, 0.5 * (t.inner.r_inner + t.inner.r_outer), 0.5 * kPi / 120) == t.rho + t.delta_rho);
    CHECK(density_at(t, 0.5 * (t.inner.r_inner + t.inner.r_outer), 1.5 * kPi / 120) == t.rho);
    CHECK(density_at(t, 0.5 * t.r_core, 0.0) == 0.0);

    HalfCylinder hc{1.0, 2.0, 1.0, 1.0};
    CHECK(density_at(hc, 0.5, 1.0) == 3.0);
    CHECK(density_at(hc, 0.5, 4.0) == 1.0);
}

TEST_CASE("angular structure helpers") {
    PeriodicAnnulus a{1.2e3, 19.3e3, 0.01, 0.02, 10, 0.2, 1e-3};
    CHECK(angular_symmetry(a) == 10);
    CHECK(angular_breakpoints(a, 0.015).size() == 20);
    CHECK(angular_breakpoints(a, 0.005).empty());
    auto t = std::get<TwoAnnuli>(find_preset("lee2020").model);
    CHECK(angular_symmetry(t) == 6);
    CHECK(angular_symmetry(HomogeneousDisk{1.0, 1.0, 1.0}) == 1);
    CHECK(angular_symmetry(with_delta_rho(a, 0.0)) == 1);
    auto rb = radial_breakpoints(t);
    CHECK(std::is_sorted(rb.begin(), rb.end()));
}

TEST_CASE("validation rejects broken invariants") {
    CHECK_THROWS_AS(validate(PeriodicAnnulus{1.0, 1.0, 0.02, 0.01, 10, 0.1, 1e-3}), InvalidGeometry);
    CHECK_THROWS_AS(validate(PeriodicAnnulus{1.0, 1.0, 0.01, 0.02, 10, 0.7, 1e-3}), InvalidGeometry);
    CHECK_THROWS_AS(validate(PeriodicAnnulus{1.0, -1.0, 0.01, 0.02, 10, 0.1, 1e-3}), InvalidGeometry);
    CHECK_THROWS_AS(validate(HomogeneousDisk{1.0, 1.0, 0.0}), InvalidGeometry);
    CHECK_THROWS_AS(validate(HalfCylinder{1.0, 1.0, -1.0, 1.0}), InvalidGeometry);
    TwoAnnuli bad = std::get<TwoAnnuli>(find_preset("lee2020").model);
    std::swap(bad.inner, bad.outer);
    CHECK_THROWS_AS(validate(bad), InvalidGeometry);
    try {
        validate(PeriodicAnnulus{1.0, 1.0, 0.02, 0.01, 10, 0.1, 1e-3});
    } catch (const InvalidGeometry& e) {
        CHECK(std::string(e.what()).find("r_inner") != std::string::npos);
    }
}

TEST_CASE("physical constant defaults") {
    PhysicalConstants k;
    CHECK(k.hbar == 1.054571817e-34);
    CHECK(k.k_boltzmann == 1.380649e-23);
    CHECK(k.m0 == 1.66053906660e-27);
}
