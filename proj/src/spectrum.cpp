#include "cslrot/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cslrot/errors.hpp"
#include "cslrot/kernel.hpp"
#include "cslrot/quadrature.hpp"
#include "cslrot/specfun.hpp"

namespace cslrot {
namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

struct Support {
    double lo, hi;
};

// Radial range over which the kernel can be non-zero.
Support radial_support(const MassModel& model, KernelMethod method) {
    if (method == KernelMethod::series) {
        auto rings = angular_rings(model);
        if (rings.empty()) return {0.0, 0.0};
        Support s{rings.front().r_inner, rings.front().r_outer};
        for (const auto& r : rings) {
            s.lo = std::min(s.lo, r.r_inner);
            s.hi = std::max(s.hi, r.r_outer);
        }
        return s;
    }
    if (const auto* t = std::get_if<TwoAnnuli>(&model)) return {t->r_core, t->r_outer_total};
    return {0.0, outer_radius(model)};
}

struct BandStats {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
};

// Integral of g(r, r') over the support square restricted to |r - r'| <= B.
template <class G>
BandStats integrate_band(G&& g, Support s, const std::vector<double>& edges, double rc,
                         const RadialOptions& opt, double abs_tol) {
    BandStats out;
    if (!(s.hi > s.lo)) return out;
    const double band = opt.band_halfwidth * rc;
    std::vector<double> outer_breaks;
    for (double c : edges)
        for (double off : {0.0, 1.0, -1.0, 3.0, -3.0, opt.band_halfwidth, -opt.band_halfwidth})
            outer_breaks.push_back(c + off * rc);

    QuadratureOptions inner_opt;
    inner_opt.rel_tol = 0.1 * opt.rel_tol;
    inner_opt.abs_tol = 0.1 * abs_tol / (s.hi - s.lo);
    inner_opt.max_intervals = opt.max_intervals;
    QuadratureOptions outer_opt;
    outer_opt.rel_tol = opt.rel_tol;
    outer_opt.abs_tol = 0.5 * abs_tol;
    outer_opt.max_intervals = opt.max_intervals;

    std::vector<double> inner_breaks;
    auto inner = [&](double r) {
        double lo = std::max(s.lo, r - band);
        double hi = std::min(s.hi, r + band);
        inner_breaks.assign(edges.begin(), edges.end());
        inner_breaks.push_back(r);
        auto h = [&](double rp) { return g(r, rp); };
        QuadratureResult res = integrate(h, lo, hi, inner_breaks, inner_opt);
        if (!res.converged) out.converged = false;
        return res.value;
    };
    QuadratureResult res = integrate(inner, s.lo, s.hi, outer_breaks, outer_opt);
    out.value = res.value;
    out.abs_error = res.abs_error;
    out.converged = out.converged && res.converged;
    return out;
}

}  // namespace

double axial_factor_y(double h, double rc) {
    if (!(h > 0.0) || !(rc > 0.0)) throw std::invalid_argument("axial factor needs h > 0 and rc > 0");
    double s = h / (2.0 * rc);
    double g;
    if (s < 0.5) {
        // sqrt(pi) s erf(s) + e^{-s^2} - 1 = sum_m (-1)^{m-1} s^{2m} / (m! (2m - 1))
        double s2 = s * s;
        double p = 1.0;
        g = 0.0;
        for (int m = 1; m < 40; ++m) {
            p *= s2 / m;
            double t = p / (2.0 * m - 1.0);
            g += (m % 2 == 1) ? t : -t;
            if (t < 1e-18 * g) break;
        }
    } else {
        double tail = s * s < 700.0 ? std::exp(-s * s) : 0.0;
        g = kSqrtPi * s * std::erf(s) + tail - 1.0;
    }
    return 4.0 * rc * rc * g;
}

double radial_abs_tolerance(const MassModel& model, double rc, const RadialOptions& opt) {
    Support s = radial_support(model, KernelMethod::quadrature);
    RadialOptions loose = opt;
    loose.rel_tol = 1e-3;
    auto bound = [&](double r, double rp) {
        double u = r - rp;
        return r * r * rp * rp * kernel_magnitude_bound(model, r, rp, rc) *
               std::exp(-u * u / (4.0 * rc * rc));
    };
    BandStats m = integrate_band(bound, s, radial_breakpoints(model), rc, loose, 0.0);
    return std::max(opt.abs_floor, opt.rel_tol * m.value);
}

RadialResult radial_factor_p(const MassModel& model, double rc, const RadialOptions& opt) {
    validate(model);
    if (!(rc > 0.0)) throw std::invalid_argument("rc must be > 0");
    RadialResult out;
    Support s = radial_support(model, opt.method);
    std::vector<double> edges = radial_breakpoints(model);
    double abs_tol = opt.abs_floor;
    if (opt.method == KernelMethod::quadrature) {
        abs_tol = radial_abs_tolerance(model, rc, opt);
        out.magnitude_scale = abs_tol / opt.rel_tol;
    }
    long evals = 0;
    long max_terms = 0;
    auto integrand = [&](double r, double rp) {
        KernelEval ev;
        if (opt.method == KernelMethod::series) {
            ev = kernel_analytic(model, r, rp, rc, opt.kernel_tol);
        } else {
            double kabs = opt.kernel_tol * kernel_magnitude_bound(model, r, rp, rc);
            ev = kernel_quadrature(model, r, rp, rc, kabs, opt.kernel_tol, opt.quadrature_density);
        }
        ++evals;
        max_terms = std::max(max_terms, ev.terms_used);
        return r * r * rp * rp * ev.weighted(r, rp, rc);
    };
    BandStats st = integrate_band(integrand, s, edges, rc, opt, abs_tol);
    out.value = st.value;
    out.abs_error = st.abs_error;
    out.kernel_evaluations = evals;
    out.max_series_terms = max_terms;
    if (!st.converged)
        throw ConvergenceError("radial integration of P did not converge", evals, st.abs_error);
    return out;
}

double csl_prefactor(double lambda, double rc, const PhysicalConstants& k) {
    double rc2 = rc * rc;
    return lambda * k.hbar * k.hbar / (4.0 * k.m0 * k.m0 * rc2 * rc2);
}

SpectrumResult csl_torque_dns(const MassModel& model, const CslParams& csl,
                              const PhysicalConstants& constants, const RadialOptions& opt) {
    if (!(csl.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    if (!(csl.rc > 0.0)) throw std::invalid_argument("rc must be > 0");
    SpectrumResult out;
    RadialResult p = radial_factor_p(model, csl.rc, opt);
    out.p_factor = p.value;
    out.p_abs_error = p.abs_error;
    out.kernel_evaluations = p.kernel_evaluations;
    out.max_series_terms = p.max_series_terms;
    out.y_factor = axial_factor_y(height_of(model), csl.rc);
    out.s_csl = csl_prefactor(csl.lambda, csl.rc, constants) * out.p_factor * out.y_factor;
    out.eta = out.s_csl / (constants.hbar * constants.hbar);
    return out;
}

void validate(const NoiseBudget& b) {
    auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!pos(b.temperature) || !pos(b.gamma) || !pos(b.inertia) || !pos(b.omega0))
        throw std::invalid_argument("noise budget parameters must be positive and finite");
    if (b.s_th_override && !pos(*b.s_th_override))
        throw std::invalid_argument("thermal floor override must be positive");
}

double thermal_torque_dns(const NoiseBudget& budget, const PhysicalConstants& constants) {
    validate(budget);
    if (budget.s_th_override) return *budget.s_th_override;
    return 4.0 * constants.k_boltzmann * budget.temperature * budget.gamma * budget.inertia;
}

double colored_multiplier(double omega, double omega_c) {
    if (!(omega_c > 0.0)) throw std::invalid_argument("colored cutoff must be > 0");
    double r = omega / omega_c;
    return 1.0 / (1.0 + r * r);
}

double angular_psd(double omega, const NoiseBudget& budget, double s_torque_total) {
    double w02 = budget.omega0 * budget.omega0;
    double d = w02 - omega * omega;
    double g = budget.gamma * omega;
    return s_torque_total / (budget.inertia * budget.inertia * (d * d + g * g));
}

}  // namespace cslrot
