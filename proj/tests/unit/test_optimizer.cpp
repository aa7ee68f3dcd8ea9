#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "cslrot/bounds.hpp"
#include "cslrot/optimizer.hpp"
#include "doctest.h"

using namespace cslrot;
constexpr double kPi = std::numbers::pi;

namespace {

AnnulusScanSpec spec(int n, double rc, double h) {
    AnnulusScanSpec s;
    s.n = n;
    s.rc = rc;
    s.height = h;
    return s;
}

void check_inertia(const ScanResult& s, bool height_axis) {
    for (const auto& p : s.points) {
        double alpha = height_axis ? s.fixed.alpha : p.axis;
        double h = height_axis ? p.axis : s.fixed.height;
        PeriodicAnnulus m{s.fixed.rho, s.fixed.delta_rho, p.r_inner, s.fixed.epsilon * p.r_inner, s.fixed.n, alpha, h};
        CHECK(moment_of_inertia(m) == doctest::Approx(s.fixed.inertia).epsilon(1e-10));
        CHECK(p.objective >= 0.0);
    }
}

}  // namespace

TEST_CASE("alpha grids") {
    auto g = default_alpha_grid(100, 61);
    CHECK(g.size() == 61);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(2.0 * kPi / 100).epsilon(1e-15));
    CHECK(std::is_sorted(g.begin(), g.end()));
    auto d = decade_alpha_grid(100, 10);
    CHECK(d.front() == 0.0);
    CHECK(d.back() == doctest::Approx(2.0 * kPi / 100).epsilon(1e-15));
    CHECK(std::adjacent_find(d.begin(), d.end(), std::greater_equal<>()) == d.end());
    CHECK(std::find_if(d.begin(), d.end(), [](double a) { return std::abs(a - 5.011872336272725e-3) < 1e-15; }) !=
          d.end());
}

TEST_CASE("alpha scan shape") {
    for (double h : {1e-3, 1e-4}) {
        ScanResult s = scan_alpha(spec(100, 1e-4, h), 25);
        check_inertia(s, false);
        double a0 = s.points.front().objective, a1 = s.points.back().objective;
        double peak = 0.0;
        for (const auto& p : s.points) peak = std::max(peak, p.objective);
        CHECK(a0 <= 1e-12 * peak);
        CHECK(a1 <= 1e-12 * peak);
        CHECK(peak > 10.0 * std::max(a0, a1));
        double best = s.points[s.argmax()].axis;
        CHECK(best > 1e-3);
        CHECK(best < 2e-2);
    }
}

TEST_CASE("zero contrast gives a zero curve") {
    AnnulusScanSpec s = spec(10, 1e-4, 1e-3);
    s.delta_rho = 0.0;
    for (const auto& p : scan_alpha(s, 9).points) CHECK(p.objective == 0.0);
}

TEST_CASE("argmax sits where the sector arc is comparable to rc") {
    for (int n : {4, 10, 100})
        for (double rc : {1e-4, 1e-6, 1e-7}) {
            ScanResult s = scan_alpha(spec(n, rc, 1e-4), decade_alpha_grid(n, 5));
            const ScanPoint& best = s.points[s.argmax()];
            double arc = best.r_inner * best.axis;
            INFO("n=" << n << " rc=" << rc << " arc=" << arc);
            CHECK(arc >= 0.1 * rc);
            CHECK(arc <= 10.0 * rc);
        }
}

TEST_CASE("height scan") {
    AnnulusScanSpec s = spec(100, 1e-4, 1e-3);
    s.alpha = 5e-3;
    ScanResult r = scan_height(s, log_grid(1e-8, 1e-1, 5));
    check_inertia(r, true);
    CHECK(r.objective_name == "PxY");
    CHECK(r.points.front().objective < 1e-3 * r.points[r.argmax()].objective);
    for (std::size_t i = 1; i < 10; ++i) CHECK(r.points[i].objective > r.points[i - 1].objective);
    double best = r.points[r.argmax()].axis;
    CHECK(best > 3e-4);
    CHECK(best < 3e-3);
}

TEST_CASE("geometry search at rc = 1e-4") {
    SearchRanges ranges;
    ranges.n_values = {4, 10, 20, 100};
    ranges.epsilon_values = {2.0};
    ranges.h_lo = ranges.h_hi = 1e-4;
    OptimizationResult res = optimize_geometry(Objective::p, ranges, Constraints{}, 1e-4, 2000);
    CHECK(res.best.n == 100);
    CHECK_FALSE(res.budget_exhausted);
    for (const auto& t : res.trace) CHECK(res.best.objective >= t.objective);

    ranges.n_values = {100};
    ranges.epsilon_values = {20.0};
    OptimizationResult wide = optimize_geometry(Objective::p, ranges, Constraints{}, 1e-4, 2000);
    CHECK(std::abs(wide.best.objective / res.best.objective - 1.0) < 0.1);
}

TEST_CASE("geometry search at rc = 1e-7 prefers few sectors") {
    SearchRanges ranges;
    ranges.n_values = {4, 10, 20, 100};
    ranges.epsilon_values = {2.0};
    ranges.h_lo = ranges.h_hi = 1e-4;
    ranges.alpha_lo_fraction = 1e-6;
    OptimizationResult res = optimize_geometry(Objective::p, ranges, Constraints{}, 1e-7, 2000);
    std::map<int, TraceEntry> per_n;
    for (const auto& t : res.trace)
        if (t.objective > per_n[t.n].objective) per_n[t.n] = t;
    for (const auto& [n, t] : per_n) MESSAGE("n=" << n << " best P " << t.objective << " at alpha " << t.alpha);
    CHECK(res.best.n == 4);
}

TEST_CASE("budget exhaustion returns the best point so far") {
    SearchRanges ranges;
    ranges.n_values = {4, 10, 20, 100};
    ranges.epsilon_values = {2.0, 20.0};
    OptimizationResult res = optimize_geometry(Objective::p_times_y, ranges, Constraints{}, 1e-4, 100);
    CHECK(res.budget_exhausted);
    CHECK(res.evaluations == 100);
    CHECK(res.trace.size() == 100);
    CHECK(res.best.objective > 0.0);
    CHECK_THROWS(optimize_geometry(Objective::p, ranges, Constraints{}, 1e-4, 10));
    SearchRanges empty;
    CHECK_THROWS(optimize_geometry(Objective::p, empty, Constraints{}, 1e-4, 1000));
}

TEST_CASE("half-cylinder figure of merit") {
    CHECK(half_cylinder_merit(100.0) == doctest::Approx(std::sqrt(kPi) / 100.0).epsilon(1e-3));
    using Big = boost::multiprecision::cpp_bin_float_50;
    Big x = Big(1) / 10000, x2 = x * x;
    Big exact = (2 - 3 * x2 + exp(-x2) * (x2 - 2) + sqrt(boost::math::constants::pi<Big>()) * x2 * x * erf(x)) /
                (x2 * x2);
    CHECK(half_cylinder_merit(1e-4) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-8));
    auto [arg, val] = boost::math::tools::brent_find_minima([](double v) { return -half_cylinder_merit(v); },
                                                            0.1, 20.0, 40);
    CHECK(arg > 2.5);
    CHECK(arg < 3.5);
    for (double v : {0.5, 1.0, 2.0, 5.0, 20.0}) CHECK(half_cylinder_merit(v) < -val + 1e-15);
}

TEST_CASE("merit function matches the pipeline up to a fixed constant") {
    double R = 1e-2, drho = 19.3e3;
    HalfCylinder hc{1.2e3, drho, R, 1e-3};
    std::vector<double> ratios;
    for (double x : {0.7, 2.8, 9.0}) {
        double rc = R / x;
        RadialOptions opt;
        opt.rel_tol = 1e-9;
        double p = radial_factor_p(hc, rc, opt).value;
        ratios.push_back(p / (half_cylinder_merit(x) * std::pow(rc, 4) * std::pow(R, 4) * drho * drho));
    }
    CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(1e-7));
    CHECK(ratios[2] == doctest::Approx(ratios[0]).epsilon(1e-7));
}
