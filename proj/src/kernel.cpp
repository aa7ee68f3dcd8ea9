#include "cslrot/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "cslrot/errors.hpp"
#include "cslrot/quadrature.hpp"
#include "cslrot/specfun.hpp"

namespace cslrot {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin(pi v) with exact zeros at integers.
double sinpi(double v) {
    double r = v - 2.0 * std::nearbyint(0.5 * v);  // r in [-1, 1]
    if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
    if (std::abs(r) == 0.5) return r > 0 ? 1.0 : -1.0;
    return std::sin(kPi * r);
}

double cospi(double v) {
    double r = std::abs(v - 2.0 * std::nearbyint(0.5 * v));
    if (r == 0.5) return 0.0;
    if (r == 0.0) return 1.0;
    if (r == 1.0) return -1.0;
    return std::cos(kPi * r);
}

bool inside(const AngularRing& ring, double r) { return r >= ring.r_inner && r <= ring.r_outer; }

bool trivial(const AngularRing& ring) { return ring.duty <= 0.0 || ring.duty >= 1.0; }

void check_tol(double tol) {
    if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("series tolerance must lie in (0, 1e-3]");
}

struct PairResult {
    double sum = 0.0;
    long terms = 0;
    double rel_err = 0.0;
};

// Scaled A contribution of ring pair (a, b) at radii (r, rp), per unit drho^2.
PairResult pair_scaled(const AngularRing& a, const AngularRing& b, double r, double rp, double rc,
                       const SeriesOptions& opt, bool allow_images) {
    PairResult out;
    if (trivial(a) || trivial(b)) return out;
    long lcm = std::lcm<long>(a.n_sectors, b.n_sectors);
    double pref = 4.0 * rc * rc * rc * rc;
    if (r * rp == 0.0) {
        // Only k = 1 survives: I_1(x) / (r r') -> 1 / (4 rc^2).
        if (lcm != 1) return out;
        double w = 4.0 * sinpi(a.duty) * sinpi(b.duty) * cospi(a.duty - b.duty);
        out.sum = pref * 2.0 * w / (4.0 * rc * rc);
        out.terms = 1;
        return out;
    }
    double x = r * rp / (2.0 * rc * rc);
    double s;
    if (allow_images && x >= 50.0 && detail::pair_series_cost(a, b, x) > lcm) {
        s = detail::pair_images(a, b, x);
        out.terms = lcm;
    } else {
        s = detail::pair_series(a, b, x, opt, out.terms, out.rel_err);
    }
    out.sum = pref * s / (r * rp);
    return out;
}

KernelEval assemble(const std::vector<AngularRing>& rings, double delta_rho, double r, double rp,
                    double rc, const SeriesOptions& opt, bool allow_images) {
    KernelEval ev;
    ev.exponent = r * rp / (2.0 * rc * rc);
    double total = 0.0;
    double err = 0.0;
    for (const auto& a : rings) {
        if (!inside(a, r)) continue;
        for (const auto& b : rings) {
            if (!inside(b, rp)) continue;
            PairResult p = pair_scaled(a, b, r, rp, rc, opt, allow_images);
            total += p.sum;
            err += std::abs(p.sum) * p.rel_err;
            ev.terms_used += p.terms;
        }
    }
    ev.scaled_value = delta_rho * delta_rho * total;
    ev.truncation_error_estimate = total != 0.0 ? err / std::abs(total) : 0.0;
    return ev;
}

}  // namespace

double KernelEval::value() const { return scaled_value * std::exp(exponent); }

double KernelEval::weighted(double r, double r_prime, double rc) const {
    double u = r - r_prime;
    return scaled_value * std::exp(-u * u / (4.0 * rc * rc));
}

namespace detail {

long pair_series_cost(const AngularRing& a, const AngularRing& b, double x) {
    long lcm = std::lcm<long>(a.n_sectors, b.n_sectors);
    double kmax = 9.0 * std::sqrt(x) + 10.0;
    return static_cast<long>(kmax / static_cast<double>(lcm)) + 1;
}

double pair_series(const AngularRing& a, const AngularRing& b, double x, const SeriesOptions& opt,
                   long& terms, double& rel_err) {
    terms = 0;
    rel_err = 0.0;
    if (trivial(a) || trivial(b) || x == 0.0) return 0.0;
    const long na = a.n_sectors;
    const long nb = b.n_sectors;
    const long lcm = std::lcm(na, nb);
    const double coef = 2.0 * static_cast<double>(na) * static_cast<double>(nb);
    const bool same = na == nb && a.duty == b.duty;
    const double cap = 4.0 * coef;  // |2 na nb w_k| <= 8 na nb
    double sum = 0.0;
    double abs_sum = 0.0;
    for (long t = 1;; ++t) {
        long k = t * lcm;
        double qa = static_cast<double>(k / na) * a.duty;
        double qb = static_cast<double>(k / nb) * b.duty;
        double w = same ? 4.0 * sinpi(qa) * sinpi(qa) : 4.0 * sinpi(qa) * sinpi(qb) * cospi(qa - qb);
        double ik = scaled_bessel_i(static_cast<int>(std::min<long>(k, 2147483647L)), x);
        double term = coef * w * ik;
        sum += term;
        abs_sum += std::abs(term);
        terms = t;
        // Tail after order k: I_{k+j L} <= I_k q^j with q = rho(k)^L.
        double rho = x / (static_cast<double>(k) + std::hypot(static_cast<double>(k), x));
        double q = std::pow(rho, static_cast<double>(lcm));
        double tail = q < 1.0 ? cap * ik * q / (1.0 - q) : INFINITY;
        if (ik == 0.0 || tail <= opt.tol * abs_sum || (abs_sum == 0.0 && tail == 0.0)) {
            rel_err = sum != 0.0 ? tail / std::abs(sum) : 0.0;
            return sum;
        }
        if (t >= opt.max_terms)
            throw ConvergenceError("kernel Bessel series did not reach tolerance", t,
                                   abs_sum > 0.0 ? tail / abs_sum : INFINITY);
    }
}

double pair_images(const AngularRing& a, const AngularRing& b, double x) {
    if (trivial(a) || trivial(b)) return 0.0;
    const long na = a.n_sectors;
    const long nb = b.n_sectors;
    const long lcm = std::lcm(na, nb);
    const long g = std::gcd(na, nb);
    const double alpha_a = kTwoPi * a.duty / static_cast<double>(na);
    const double alpha_b = kTwoPi * b.duty / static_cast<double>(nb);
    const double c[4] = {0.0, alpha_a - alpha_b, -alpha_b, alpha_a};
    const double sign[4] = {1.0, 1.0, -1.0, -1.0};
    double total = 0.0;
    for (long k = 0; k < lcm; ++k) {
        long kk = 2 * k > lcm ? k - lcm : k;
        double psi = kTwoPi * static_cast<double>(kk) / static_cast<double>(lcm);
        double s2[4];
        int ref = 0;
        for (int i = 0; i < 4; ++i) {
            double sh = std::sin(0.5 * (psi + c[i]));
            s2[i] = sh * sh;
            if (s2[i] < s2[ref]) ref = i;
        }
        double e_ref = -2.0 * x * s2[ref];
        if (e_ref < -700.0) continue;
        double acc = 0.0;
        for (int i = 0; i < 4; ++i) {
            if (i == ref) continue;
            // sin^2 A - sin^2 B = sin(A - B) sin(A + B), free of cancellation.
            double d = std::sin(0.5 * (c[i] - c[ref])) * std::sin(psi + 0.5 * (c[i] + c[ref]));
            acc += sign[i] * std::expm1(-2.0 * x * d);
        }
        total += std::exp(e_ref) * acc;
    }
    return static_cast<double>(g) * total;
}

}  // namespace detail

KernelEval kernel_series_annulus(const PeriodicAnnulus& model, double r, double r_prime, double rc,
                                 double tol) {
    check_tol(tol);
    validate(model);
    SeriesOptions opt;
    opt.tol = tol;
    return assemble(angular_rings(model), model.delta_rho, r, r_prime, rc, opt, false);
}

KernelEval kernel_series_two_annuli(const TwoAnnuli& model, double r, double r_prime, double rc,
                                    double tol) {
    check_tol(tol);
    validate(model);
    SeriesOptions opt;
    opt.tol = tol;
    auto rings = angular_rings(model);
    KernelEval ev = assemble({rings[0]}, model.delta_rho, r, r_prime, rc, opt, false);
    KernelEval outer = assemble({rings[1]}, model.delta_rho, r, r_prime, rc, opt, false);
    double total = ev.scaled_value + outer.scaled_value;
    double err = std::abs(ev.scaled_value) * ev.truncation_error_estimate +
                 std::abs(outer.scaled_value) * outer.truncation_error_estimate;
    ev.terms_used += outer.terms_used;
    if (!mixed_term_vanishes(model.inner.n_sectors, model.outer.n_sectors)) {
        for (auto [a, b] : {std::pair{rings[0], rings[1]}, std::pair{rings[1], rings[0]}}) {
            if (!inside(a, r) || !inside(b, r_prime)) continue;
            PairResult p = pair_scaled(a, b, r, r_prime, rc, opt, false);
            double v = model.delta_rho * model.delta_rho * p.sum;
            total += v;
            err += std::abs(v) * p.rel_err;
            ev.terms_used += p.terms;
        }
    }
    ev.scaled_value = total;
    ev.truncation_error_estimate = total != 0.0 ? err / std::abs(total) : 0.0;
    return ev;
}

KernelEval kernel_analytic(const MassModel& model, double r, double r_prime, double rc, double tol) {
    SeriesOptions opt;
    opt.tol = tol;
    auto rings = angular_rings(model);
    if (const auto* two = std::get_if<TwoAnnuli>(&model);
        two && mixed_term_vanishes(two->inner.n_sectors, two->outer.n_sectors)) {
        KernelEval a = assemble({rings[0]}, two->delta_rho, r, r_prime, rc, opt, true);
        KernelEval b = assemble({rings[1]}, two->delta_rho, r, r_prime, rc, opt, true);
        double total = a.scaled_value + b.scaled_value;
        double err = std::abs(a.scaled_value) * a.truncation_error_estimate +
                     std::abs(b.scaled_value) * b.truncation_error_estimate;
        a.scaled_value = total;
        a.terms_used += b.terms_used;
        a.truncation_error_estimate = total != 0.0 ? err / std::abs(total) : 0.0;
        return a;
    }
    return assemble(rings, excess_density(model), r, r_prime, rc, opt, true);
}

KernelEval kernel_image_sum(const MassModel& model, double r, double r_prime, double rc) {
    KernelEval ev;
    ev.exponent = r * r_prime / (2.0 * rc * rc);
    if (r * r_prime == 0.0) return kernel_analytic(model, r, r_prime, rc);
    double d = excess_density(model);
    double total = 0.0;
    for (const auto& a : angular_rings(model)) {
        if (!inside(a, r)) continue;
        for (const auto& b : angular_rings(model)) {
            if (!inside(b, r_prime)) continue;
            total += detail::pair_images(a, b, ev.exponent);
            ev.terms_used += std::lcm<long>(a.n_sectors, b.n_sectors);
        }
    }
    ev.scaled_value = 4.0 * rc * rc * rc * rc * d * d * total / (r * r_prime);
    return ev;
}

double kernel_magnitude_bound(const MassModel& model, double r, double r_prime, double rc) {
    double x = r * r_prime / (2.0 * rc * rc);
    double dmax = max_density(model);
    return dmax * dmax * 4.0 * kPi * kPi * 2.0 * rc * rc * (scaled_bessel_i(0, x) + scaled_bessel_i(1, x));
}

KernelEval half_cylinder_kernel(double r, double r_prime, double radius, double rc, double delta_rho) {
    KernelEval ev;
    ev.exponent = r * r_prime / (2.0 * rc * rc);
    ev.terms_used = 1;
    if (r > radius || r_prime > radius || r < 0.0 || r_prime < 0.0) return ev;
    double c = 8.0 * rc * rc * delta_rho * delta_rho;
    if (r * r_prime == 0.0) {
        ev.scaled_value = c;
        return ev;
    }
    // 16 rc^4 drho^2 sinh(x) / (r r') with e^{-x} folded in.
    double x = ev.exponent;
    double s = x > 400.0 ? 1.0 : -std::expm1(-2.0 * x);
    ev.scaled_value = c * rc * rc * s / (r * r_prime);
    return ev;
}

bool mixed_term_vanishes(int n, int m) {
    if (n < 1 || m < 1) throw std::invalid_argument("sector counts must be >= 1");
    int g = std::gcd(n, m);
    return (n / g) % 2 == 0 || (m / g) % 2 == 0;
}

}  // namespace cslrot
