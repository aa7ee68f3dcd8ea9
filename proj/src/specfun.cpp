#include "cslrot/specfun.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace cslrot {
namespace {

constexpr double kLn2Pi = 1.8378770664093454836;
constexpr int kSeriesMaxOrder = 40;
constexpr double kSeriesMaxArg = 30.0;
constexpr int kDebyeTerms = 13;

// Debye polynomials u_k(t), coefficient i multiplies t^i.
// u_{k+1} = t^2 (1 - t^2) u_k' / 2 + (1/8) int_0^t (1 - 5 s^2) u_k(s) ds
const std::vector<std::vector<double>>& debye_polynomials() {
    static const std::vector<std::vector<double>> polys = [] {
        std::vector<std::vector<double>> u(kDebyeTerms);
        u[0] = {1.0};
        for (int k = 0; k + 1 < kDebyeTerms; ++k) {
            const auto& p = u[k];
            std::vector<double> next(p.size() + 3, 0.0);
            for (std::size_t i = 1; i < p.size(); ++i) {
                double d = 0.5 * static_cast<double>(i) * p[i];
                next[i + 1] += d;
                next[i + 3] -= d;
            }
            for (std::size_t i = 0; i < p.size(); ++i) {
                next[i + 1] += 0.125 * p[i] / static_cast<double>(i + 1);
                next[i + 3] -= 0.625 * p[i] / static_cast<double>(i + 3);
            }
            u[k + 1] = std::move(next);
        }
        return u;
    }();
    return polys;
}

double horner(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
}

// ln(e^{-x} I_nu(x)) from the ascending series; nu < 40, 0 < x < 30.
double log_scaled_series(int nu, double x) {
    double sum = 1.0;
    if (x > 1e-150) {
        double q = 0.25 * x * x;
        double term = 1.0;
        for (int k = 1; k < 500; ++k) {
            term *= q / (static_cast<double>(k) * (nu + k));
            sum += term;
            if (term < 1e-17 * sum && k > x) break;
        }
    }
    return nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) + std::log(sum) - x;
}

// Uniform asymptotic expansion in the scaled log form; nu >= 1, x > 0.
double log_scaled_debye(int order, double x) {
    double nu = order;
    double w = std::hypot(nu, x);
    double t = nu / w;
    double ratio = nu / x;
    double ash = ratio < 1e150 ? std::asinh(ratio) : std::log(2.0) + std::log(nu) - std::log(x);
    double s = 1.0;
    double inv = 1.0;
    const auto& u = debye_polynomials();
    for (int k = 1; k < kDebyeTerms; ++k) {
        inv /= nu;
        double term = horner(u[k], t) * inv;
        s += term;
        if (std::abs(term) < 1e-17) break;
    }
    return nu * nu / (w + x) - nu * ash - 0.5 * (kLn2Pi + std::log(w)) + std::log(s);
}

}  // namespace

LogValue log_scaled_bessel_i(int order, double x) {
    if (order < 0) order = -order;
    if (x == 0.0) return order == 0 ? LogValue{0.0, false} : LogValue::zero();
    if (order < kSeriesMaxOrder && x < kSeriesMaxArg)
        return {log_scaled_series(order, x), false};
    if (order >= kSeriesMaxOrder) return {log_scaled_debye(order, x), false};

    // Large argument, small order: seed at the seam and recur downwards,
    // the stable direction for I.
    double hi = std::exp(log_scaled_debye(kSeriesMaxOrder + 1, x));
    double mid = std::exp(log_scaled_debye(kSeriesMaxOrder, x));
    for (int k = kSeriesMaxOrder; k > order; --k) {
        double lo = (2.0 * k / x) * mid + hi;
        hi = mid;
        mid = lo;
    }
    return {std::log(mid), false};
}

LogValue log_bessel_i(int order, double x) {
    LogValue v = log_scaled_bessel_i(order, x);
    if (!v.is_zero) v.log_magnitude += x;
    return v;
}

double scaled_bessel_i(int order, double x) {
    LogValue v = log_scaled_bessel_i(order, x);
    if (v.is_zero || v.log_magnitude < -708.0) return 0.0;
    return std::exp(v.log_magnitude);
}

double erf(double x) { return std::erf(x); }

}  // namespace cslrot
