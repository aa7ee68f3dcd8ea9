#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "cslrot/errors.hpp"
#include "cslrot/kernel.hpp"
#include "cslrot/quadrature.hpp"

namespace cslrot {

using Quad = boost::multiprecision::float128;
using Fifty = boost::multiprecision::cpp_bin_float_50;

namespace {

// Boost stores the non-negative nodes in ascending order; the panel rule wants them descending.
template <class Real>
struct BoostNodes {
    static const Real* xgk() {
        static const auto v = reversed<8>(boost::math::quadrature::gauss_kronrod<Real, 15>::abscissa());
        return v.data();
    }
    static const Real* wgk() {
        static const auto v = reversed<8>(boost::math::quadrature::gauss_kronrod<Real, 15>::weights());
        return v.data();
    }
    static const Real* wg() {
        static const auto v = reversed<4>(boost::math::quadrature::gauss<Real, 7>::weights());
        return v.data();
    }
    template <std::size_t N, class A>
    static std::array<Real, N> reversed(const A& a) {
        std::array<Real, N> v;
        for (std::size_t j = 0; j < N; ++j) v[j] = a[N - 1 - j];
        return v;
    }
};

}  // namespace

template <>
struct GkNodes<Quad> {
    static inline const Quad* const xgk = BoostNodes<Quad>::xgk();
    static inline const Quad* const wgk = BoostNodes<Quad>::wgk();
    static inline const Quad* const wg = BoostNodes<Quad>::wg();
};

template <>
struct GkNodes<Fifty> {
    static inline const Fifty* const xgk = BoostNodes<Fifty>::xgk();
    static inline const Fifty* const wgk = BoostNodes<Fifty>::wgk();
    static inline const Fifty* const wg = BoostNodes<Fifty>::wg();
};

namespace {

template <class Real>
struct Ring {
    int n;
    Real duty;
    Real delta_rho;
};

double angular_mean_density(const MassModel& model, double r) {
    std::vector<double> b = angular_breakpoints(model, r);
    if (b.empty()) return density_at(model, r, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        double lo = b[i], hi = i + 1 < b.size() ? b[i + 1] : b[0] + 2.0 * std::numbers::pi;
        sum += (hi - lo) * density_at(model, r, 0.5 * (lo + hi));
    }
    return sum / (2.0 * std::numbers::pi);
}

// Angular density profile at one radius: `offset` plus the deviation of each
// covering ring from its own mean.
template <class Real>
class Slice {
public:
    Slice(const MassModel& model, double radius, double offset) : offset_(offset) {
        double drho = excess_density(model);
        for (const auto& ring : angular_rings(model)) {
            if (radius < ring.r_inner || radius > ring.r_outer) continue;
            if (!(ring.duty > 0.0 && ring.duty < 1.0) || drho == 0.0) continue;
            rings_.push_back({ring.n_sectors, Real(ring.duty), Real(drho)});
        }
    }
    bool empty() const { return rings_.empty() && offset_ == 0; }
    Real operator()(const Real& theta) const {
        Real v = offset_;
        for (const auto& g : rings_) {
            Real t = theta * g.n / two_pi();
            Real frac = t - floor(t);
            v += g.delta_rho * ((frac < g.duty ? Real(1) : Real(0)) - g.duty);
        }
        return v;
    }
    // Jump locations inside (lo, hi).
    void breaks(const Real& lo, const Real& hi, std::vector<Real>& out) const {
        for (const auto& g : rings_) {
            Real step = two_pi() / g.n;
            long j0 = static_cast<long>(floor(lo / step)) - 1;
            for (long j = j0;; ++j) {
                Real a = step * j;
                if (a > hi) break;
                Real b = step * (j + g.duty);
                if (a > lo) out.push_back(a);
                if (b > lo && b < hi) out.push_back(b);
            }
        }
    }
    static Real two_pi() { return 2 * boost::math::constants::pi<Real>(); }

private:
    Real offset_;
    std::vector<Ring<Real>> rings_;
};

// With phi = theta - theta' the double integral becomes
//   A = sym * int dphi f(phi) C(phi),  C(phi) = int_period dtheta d_r(theta) d_r'(theta - phi),
// where C is piecewise linear with kinks at differences of jump angles.
template <class Real>
KernelEval angular_kernel(const MassModel& model, double r, double r_prime, double rc, double abs_tol,
                          double rel_tol, QuadratureDensity part) {
    validate(model);
    KernelEval ev;
    ev.exponent = r * r_prime / (2.0 * rc * rc);
    bool full = part == QuadratureDensity::full;
    Slice<Real> at_r(model, r, full ? angular_mean_density(model, r) : 0.0);
    Slice<Real> at_rp(model, r_prime, full ? angular_mean_density(model, r_prime) : 0.0);
    if (at_r.empty() || at_rp.empty()) return ev;
    // Rounding limits accuracy to a few ulps of the scale.
    double ulp = static_cast<double>(std::numeric_limits<Real>::epsilon());
    abs_tol = std::max(abs_tol, 10.0 * ulp * kernel_magnitude_bound(model, r, r_prime, rc));

    const Real pi = boost::math::constants::pi<Real>();
    const Real x = Real(r) * Real(r_prime) / (2 * Real(rc) * Real(rc));
    const Real rr = Real(r) * Real(r_prime);
    const Real two_rc2 = 2 * Real(rc) * Real(rc);
    const int sym = angular_symmetry(model);
    const Real period = 2 * pi / sym;
    // Outside this window the exponential is below the working precision.
    const double cut = 5.0 - 0.5 * std::log(ulp);
    const Real half_window = x > cut ? Real(2 * asin(sqrt(cut / x))) : pi;

    auto f = [&](const Real& phi) -> Real {
        Real s = sin(phi / 2), c = cos(phi / 2);
        Real sp = 2 * s * c;
        return (two_rc2 * (1 - 2 * s * s) - rr * sp * sp) * exp(-2 * x * s * s);
    };

    std::vector<Real> jumps_r, jumps_rp;
    at_r.breaks(Real(0), period, jumps_r);
    jumps_r.push_back(Real(0));
    at_rp.breaks(Real(0), period, jumps_rp);
    jumps_rp.push_back(Real(0));

    std::vector<Real> cuts;
    auto correlation = [&](const Real& phi) {
        cuts = jumps_r;
        for (const Real& b : jumps_rp) {
            Real c = b + phi;
            c -= period * floor(c / period);
            cuts.push_back(c);
        }
        cuts.push_back(period);
        std::sort(cuts.begin(), cuts.end());
        // Piecewise constant between cuts, so the midpoint rule is exact on each panel.
        Real sum = 0;
        for (std::size_t j = 1; j < cuts.size(); ++j) {
            Real w = cuts[j] - cuts[j - 1];
            if (w <= 0) continue;
            Real mid = (cuts[j] + cuts[j - 1]) / 2;
            sum += w * at_r(mid) * at_rp(mid - phi);
        }
        ev.terms_used += static_cast<long>(cuts.size());
        return sum;
    };

    std::vector<Real> kinks{Real(0), -half_window, half_window};
    for (const Real& a : jumps_r)
        for (const Real& b : jumps_rp) {
            Real d = a - b;
            for (Real k = floor((-half_window - d) / period); d + k * period <= half_window; k += 1) {
                Real p = d + k * period;
                if (p > -half_window) kinks.push_back(p);
            }
        }
    std::sort(kinks.begin(), kinks.end());
    kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());
    std::vector<Real> c_at(kinks.size());
    for (std::size_t j = 0; j < kinks.size(); ++j) c_at[j] = correlation(kinks[j]);
    // Exact linear interpolation of C between neighbouring kinks.
    auto interpolated = [&](const Real& phi) -> Real {
        auto it = std::upper_bound(kinks.begin(), kinks.end(), phi);
        std::size_t j = it == kinks.begin() ? 1 : (it == kinks.end() ? kinks.size() - 1 : it - kinks.begin());
        Real t = (phi - kinks[j - 1]) / (kinks[j] - kinks[j - 1]);
        return c_at[j - 1] + t * (c_at[j] - c_at[j - 1]);
    };
    auto integrand = [&](const Real& phi) -> Real { return f(phi) * interpolated(phi); };
    auto res = integrate_generic<Real>(integrand, -half_window, half_window, std::span<const Real>(kinks),
                                       Real(abs_tol) / sym, Real(rel_tol),
                                       static_cast<int>(kinks.size()) + 100000);
    ev.scaled_value = static_cast<double>(Real(sym * res.value));
    double abs_err = static_cast<double>(Real(sym * res.abs_error));
    ev.truncation_error_estimate = ev.scaled_value != 0.0 ? abs_err / std::abs(ev.scaled_value) : 0.0;
    if (!res.converged) throw ConvergenceError("angular quadrature did not converge", ev.terms_used, abs_err);
    return ev;
}

}  // namespace

KernelEval kernel_quadrature(const MassModel& model, double r, double r_prime, double rc, double abs_tol,
                             double rel_tol, QuadratureDensity part) {
    return angular_kernel<double>(model, r, r_prime, rc, abs_tol, rel_tol, part);
}

KernelEval kernel_quadrature_extended(const MassModel& model, double r, double r_prime, double rc,
                                      double abs_tol, double rel_tol, ExtendedPrecision precision) {
    if (precision == ExtendedPrecision::digits50)
        return angular_kernel<Fifty>(model, r, r_prime, rc, abs_tol, rel_tol, QuadratureDensity::fluctuation);
    return angular_kernel<Quad>(model, r, r_prime, rc, abs_tol, rel_tol, QuadratureDensity::fluctuation);
}

}  // namespace cslrot
