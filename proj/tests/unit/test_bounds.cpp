#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "cslrot/bounds.hpp"
#include "cslrot/errors.hpp"
#include "cslrot/io.hpp"
#include "cslrot/presets.hpp"
#include "doctest.h"

using namespace cslrot;
constexpr double kPi = std::numbers::pi;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    auto path = std::filesystem::temp_directory_path() / ("cslrot_test_" + name);
    std::ofstream(path) << text;
    return path.string();
}

}  // namespace

TEST_CASE("bound definition and linearity in the floor") {
    const Preset& p = find_preset("lee2020");
    NoiseBudget floor = p.budget;
    BoundValue one = lambda_upper_bound(p.model, 1e-4, floor);
    REQUIRE(one.lambda_max);
    floor.s_th_override = 2e-30;
    BoundValue two = lambda_upper_bound(p.model, 1e-4, floor);
    CHECK(*two.lambda_max == doctest::Approx(2.0 * *one.lambda_max).epsilon(1e-14));
    CHECK(*one.lambda_max > 1e-9 / 3);
    CHECK(*one.lambda_max < 3e-9);
}

TEST_CASE("every bound point reproduces the floor") {
    const Preset& p = find_preset("lee2020");
    BoundCurve c = bound_curve(p.model, log_grid(1e-6, 1e-2, 3), p.budget);
    double s_th = thermal_torque_dns(p.budget);
    for (const auto& pt : c.points) {
        REQUIRE(pt.lambda_max);
        CHECK(*pt.lambda_max > 0.0);
        SpectrumResult s = csl_torque_dns(p.model, {*pt.lambda_max, pt.rc, std::nullopt});
        CHECK(s.s_csl == doctest::Approx(s_th).epsilon(1e-9));
    }
    for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].rc > c.points[i - 1].rc);
}

TEST_CASE("raising the floor raises the bound everywhere") {
    const Preset& p = find_preset("table1_rc1e-4");
    auto grid = log_grid(1e-6, 1e-3, 2);
    NoiseBudget high = p.budget;
    high.s_th_override = 1.5e-30;
    BoundCurve a = bound_curve(p.model, grid, p.budget), b = bound_curve(p.model, grid, high);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(*b.points[i].lambda_max > *a.points[i].lambda_max);
}

TEST_CASE("homogeneous disk has no constraint") {
    HomogeneousDisk d{19.3e3, 0.02, 1e-3};
    BoundCurve c = bound_curve(d, log_grid(1e-6, 1e-3, 1), find_preset("lee2020").budget);
    for (const auto& pt : c.points) {
        CHECK_FALSE(pt.lambda_max);
        CHECK(pt.flags.front() == "unbounded");
    }
    std::string csv = bound_curve_csv(c, Metadata{});
    CHECK(csv.find("unbounded") != std::string::npos);
    CHECK(csv.find("inf") == std::string::npos);
    CHECK(bound_curve_json(c, Metadata{}).dump().find("\"unbounded\"") != std::string::npos);
}

TEST_CASE("local minima of the bound curves") {
    SUBCASE("experimental disk has two") {
        const Preset& p = find_preset("lee2020");
        BoundCurve c = bound_curve(p.model, log_grid(1e-6, 1e-2, 15), p.budget);
        CHECK(mark_local_minima(c).size() == 2);
    }
    SUBCASE("single annulus has one near its design rc") {
        const Preset& p = find_preset("table1_rc1e-4");
        BoundCurve c = bound_curve(p.model, log_grid(1e-6, 1e-2, 10), p.budget);
        auto minima = mark_local_minima(c);
        REQUIRE(minima.size() == 1);
        double rc = c.points[minima[0]].rc;
        CHECK(rc > 1e-5);
        CHECK(rc < 1e-3);
    }
}

TEST_CASE("thermal rescaling") {
    CHECK(rescale_thermal(1e-30, 1.0, 1.0) == 1e-30);
    CHECK(rescale_thermal(1e-30, 1.0, 0.05 / 300.0) == doctest::Approx(1e-30 * 0.05 / 300.0).epsilon(1e-15));
    CHECK(rescale_thermal(1e-30, 1.0, 0.001 / 300.0) == doctest::Approx(1e-30 * 0.001 / 300.0).epsilon(1e-15));
    CHECK(rescale_thermal(1e-30, 0.5, 2.0) == doctest::Approx(1e-30).epsilon(1e-15));
    NoiseBudget b = rescaled_budget(find_preset("discussion_optimized"), 0.05);
    CHECK(thermal_torque_dns(b) ==
          doctest::Approx(thermal_torque_dns(find_preset("discussion_optimized").budget) * 0.05 / 300.0).epsilon(1e-14));
}

TEST_CASE("colored adjustment") {
    const Preset& p = find_preset("lee2020");
    BoundCurve white = bound_curve(p.model, log_grid(1e-5, 1e-3, 2), p.budget);
    double lo = 2.0 * kPi * 2e-3, hi = 2.0 * kPi * 0.1;
    BoundCurve c = colored_bound_adjustment(white, 1e12, lo, hi);
    BoundCurve inf = colored_bound_adjustment(white, std::numeric_limits<double>::infinity(), lo, hi);
    BoundCurve path = colored_bound_adjustment(white, 2.0 * kPi * 0.1, lo, hi);
    for (std::size_t i = 0; i < white.points.size(); ++i) {
        double w = *white.points[i].lambda_max;
        CHECK(std::abs(*c.points[i].lambda_max / w - 1.0) <= 1e-20);
        CHECK(*inf.points[i].lambda_max == w);
        double ratio = *path.points[i].lambda_max / w;
        CHECK(ratio > 1.0);
        CHECK(ratio <= 2.0 * (1.0 + 1e-15));
    }
    CHECK(c.omega_c == 1e12);
}

TEST_CASE("log grid") {
    auto g = log_grid(1e-6, 1e-2, 25);
    CHECK(g.size() == 101);
    CHECK(g.front() == doctest::Approx(1e-6).epsilon(1e-14));
    CHECK(g.back() == doctest::Approx(1e-2).epsilon(1e-14));
    CHECK_THROWS(log_grid(0.0, 1.0, 5));
    CHECK_THROWS(log_grid(1.0, 0.5, 5));
}

TEST_CASE("overlay ingestion") {
    SUBCASE("empty file") { CHECK(ingest_overlay(write_temp("empty.csv", "")).empty()); }
    SUBCASE("one monotone curve") {
        auto c = ingest_overlay(write_temp("one.csv", "label,rc_m,lambda_s^-1\nLIGO,1e-6,3e-9\nLIGO,1e-7,2e-8\n"));
        REQUIRE(c.size() == 1);
        CHECK(c[0].label == "LIGO");
        REQUIRE(c[0].points.size() == 2);
        CHECK(c[0].points[0].first == 1e-7);
    }
    SUBCASE("two labels") {
        auto c = ingest_overlay(write_temp("two.csv", "label,rc_m,lambda_s^-1\nA,1e-6,1e-9\nB,1e-6,1e-8\n"));
        CHECK(c.size() == 2);
    }
    SUBCASE("non-positive lambda") {
        std::string path = write_temp("bad.csv", "label,rc_m,lambda_s^-1\nA,1e-6,1e-9\nA,1e-5,-1\n");
        CHECK_THROWS_WITH_AS(ingest_overlay(path), doctest::Contains(":3:"), InputError);
    }
    SUBCASE("malformed row") {
        std::string path = write_temp("short.csv", "label,rc_m,lambda_s^-1\nA,1e-6\n");
        CHECK_THROWS_AS(ingest_overlay(path), InputError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(ingest_overlay("/nonexistent/overlay.csv"), InputError); }
}
