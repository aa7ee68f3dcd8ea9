#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "cslrot/specfun.hpp"
#include "doctest.h"

using namespace cslrot;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// Ascending series sum_k (x/2)^{2k+nu} / (k! (k+nu)!) at 50 digits.
Big bessel_series(int nu, double xd, int terms) {
    Big x = xd, half = x / 2, sum = 0;
    Big term = boost::multiprecision::pow(half, nu);
    for (int j = 1; j <= nu; ++j) term /= j;
    for (int k = 0; k < terms; ++k) {
        sum += term;
        term *= half * half / ((k + 1) * Big(k + 1 + nu));
    }
    return sum;
}

// e^{-x} I_nu(x) = (1/pi) int_0^pi e^{x (cos t - 1)} cos(nu t) dt for integer nu.
double scaled_by_integral(int nu, double x) {
    double upper = std::min(std::numbers::pi, 40.0 / std::sqrt(x));
    auto f = [&](double t) { return std::exp(-2.0 * x * std::pow(std::sin(0.5 * t), 2)) * std::cos(nu * t); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, upper, 20, 1e-15) /
           std::numbers::pi;
}

}  // namespace

TEST_CASE("log_bessel_i at the origin") {
    LogValue v0 = log_bessel_i(0, 0.0);
    CHECK_FALSE(v0.is_zero);
    CHECK(v0.log_magnitude == 0.0);
    CHECK(log_bessel_i(1, 0.0).is_zero);
    CHECK(scaled_bessel_i(0, 0.0) == 1.0);
}

TEST_CASE("log_bessel_i(1, 1) matches a 40-term ascending series") {
    double ref = static_cast<double>(log(bessel_series(1, 1.0, 40)));
    CHECK(std::abs(log_bessel_i(1, 1.0).log_magnitude - ref) <= 1e-13);
}

TEST_CASE("scaled_bessel_i(3, 10) matches the series") {
    double ref = static_cast<double>(exp(Big(-10)) * bessel_series(3, 10.0, 80));
    CHECK(scaled_bessel_i(3, 10.0) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("log_bessel_i(500, 1e6) matches the integral representation") {
    double ref = std::log(scaled_by_integral(500, 1e6)) + 1e6;
    CHECK(std::abs(log_bessel_i(500, 1e6).log_magnitude - ref) <= 1e-10);
}

TEST_CASE("log_bessel_i over a grid against an independent implementation") {
    for (int nu : {0, 1, 2, 5, 17, 39, 40, 41, 80, 150, 200})
        for (double x : {1e-3, 0.5, 3.0, 29.0, 30.0, 31.0, 120.0, 500.0}) {
            double ref = std::log(boost::math::cyl_bessel_i(nu, x));
            if (!std::isfinite(ref)) continue;
            INFO("nu=" << nu << " x=" << x);
            CHECK(std::abs(log_bessel_i(nu, x).log_magnitude - ref) <= 1e-10);
        }
    for (int nu : {0, 3, 60, 400})
        for (double x : {1e4, 1e7, 1e10}) {
            INFO("nu=" << nu << " x=" << x);
            double ref = std::log(scaled_by_integral(nu, x));
            CHECK(std::abs(log_scaled_bessel_i(nu, x).log_magnitude - ref) <= 1e-10);
        }
}

TEST_CASE("scaled_bessel_i approaches 1/sqrt(2 pi x)") {
    double x = 1e8;
    CHECK(scaled_bessel_i(0, x) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * x)).epsilon(1e-8));
    CHECK(log_scaled_bessel_i(0, 1e12).log_magnitude ==
          doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi * 1e12)).epsilon(1e-12));
}

TEST_CASE("three-term recurrence holds in log form") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> order(1, 200);
    std::uniform_real_distribution<double> arg(1e-2, 500.0);
    for (int i = 0; i < 400; ++i) {
        int nu = order(rng);
        double x = arg(rng);
        double l = log_scaled_bessel_i(nu, x).log_magnitude;
        double lhs = std::exp(log_scaled_bessel_i(nu - 1, x).log_magnitude - l) -
                     std::exp(log_scaled_bessel_i(nu + 1, x).log_magnitude - l);
        double rhs = 2.0 * nu / x;
        INFO("nu=" << nu << " x=" << x);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * rhs);
    }
}

TEST_CASE("scaled_bessel_i is non-increasing in order") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lx(-3.0, 8.0);
    for (int i = 0; i < 100; ++i) {
        double x = std::pow(10.0, lx(rng));
        double prev = scaled_bessel_i(0, x);
        for (int nu = 1; nu <= 300; ++nu) {
            double v = scaled_bessel_i(nu, x);
            CHECK(v <= prev);
            CHECK(v >= 0.0);
            prev = v;
        }
    }
}

TEST_CASE("log and scaled forms agree") {
    for (int nu : {0, 4, 39, 40, 100})
        for (double x : {0.1, 10.0, 29.9, 30.1, 300.0, 690.0}) {
            double a = std::exp(log_bessel_i(nu, x).log_magnitude) * std::exp(-x);
            double b = scaled_bessel_i(nu, x);
            if (b < 1e-300) continue;
            CHECK(a == doctest::Approx(b).epsilon(1e-10));
        }
}

TEST_CASE("erf") {
    CHECK(cslrot::erf(0.0) == 0.0);
    CHECK(cslrot::erf(10.0) == 1.0);
    long double x = 1.0L, sum = 0.0L, term = x;
    for (int k = 0; k < 40; ++k) {
        sum += term / (2 * k + 1);
        term *= -x * x / (k + 1);
    }
    double ref = static_cast<double>(2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum);
    CHECK(std::abs(cslrot::erf(1.0) - ref) <= 1e-14);
    for (double v : {0.3, 1.7, 4.0}) {
        CHECK(cslrot::erf(-v) == -cslrot::erf(v));
        CHECK(std::abs(cslrot::erf(v)) <= 1.0);
    }
}
