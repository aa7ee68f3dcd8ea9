#include "cslrot/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cslrot/bounds.hpp"
#include "cslrot/errors.hpp"
#include "cslrot/parallel.hpp"

namespace cslrot {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct BudgetExhausted {};

ScanPoint evaluate_annulus(const AnnulusScanSpec& s, double alpha, double h, bool with_y,
                           const RadialOptions& opt) {
    ScanPoint pt;
    try {
        double r = solve_inner_radius(s.inertia, s.rho, s.delta_rho, s.n, alpha, s.epsilon, h);
        pt.r_inner = r;
        PeriodicAnnulus m{s.rho, s.delta_rho, r, s.epsilon * r, s.n, alpha, h};
        double p = radial_factor_p(m, s.rc, opt).value;
        pt.objective = with_y ? p * axial_factor_y(h, s.rc) : p;
    } catch (const InvalidGeometry& e) {
        pt.flags = "geometry_failure";
    } catch (const ConvergenceError& e) {
        pt.flags = "convergence_failure";
    }
    return pt;
}

std::vector<double> log_points(double lo, double hi, int count) {
    std::vector<double> out;
    if (count == 1) return {std::sqrt(lo * hi)};
    for (int i = 0; i < count; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return out;
}

// Golden-section maximisation of f(exp(u)) over u in [log lo, log hi].
template <class F>
double golden_log_max(F&& f, double lo, double hi, int iterations) {
    const double g = 0.6180339887498949;
    double a = std::log(lo), b = std::log(hi);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(std::exp(c)), fd = f(std::exp(d));
    for (int i = 0; i < iterations; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(std::exp(d));
        }
    }
    return std::exp(fc > fd ? c : d);
}

}  // namespace

std::size_t ScanResult::argmax() const {
    std::size_t best = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].flags != "ok") continue;
        if (best == points.size() || points[i].objective > points[best].objective) best = i;
    }
    return best;
}

std::vector<double> default_alpha_grid(int n, int grid) {
    if (grid < 8) throw std::invalid_argument("alpha grid needs at least 8 points");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    double amax = kTwoPi / n;
    std::vector<double> out{0.0};
    int interior = grid - 2;
    for (int i = 0; i < interior; ++i)
        out.push_back(amax * std::pow(10.0, -6.0 + 6.0 * i / interior));
    out.push_back(amax);
    return out;
}

std::vector<double> decade_alpha_grid(int n, int per_decade) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    double amax = kTwoPi / n;
    std::vector<double> out{0.0};
    for (double a : log_grid(amax * 1e-6, amax, per_decade))
        if (a < amax * (1.0 - 1e-12)) out.push_back(a);
    out.push_back(amax);
    return out;
}

ScanResult scan_alpha(const AnnulusScanSpec& spec, const std::vector<double>& alphas,
                      const RadialOptions& opt, int workers) {
    ScanResult out;
    out.axis_name = "alpha_rad";
    out.objective_name = "P";
    out.fixed = spec;
    out.points.resize(alphas.size());
    parallel_for(alphas.size(), workers, [&](std::size_t i) {
        out.points[i] = evaluate_annulus(spec, alphas[i], spec.height, false, opt);
        out.points[i].axis = alphas[i];
    });
    return out;
}

ScanResult scan_alpha(const AnnulusScanSpec& spec, int grid, const RadialOptions& opt, int workers) {
    return scan_alpha(spec, default_alpha_grid(spec.n, grid), opt, workers);
}

ScanResult scan_height(const AnnulusScanSpec& spec, const std::vector<double>& heights,
                       const RadialOptions& opt, int workers) {
    for (double h : heights)
        if (!(h > 0.0)) throw std::invalid_argument("height grid must be positive");
    ScanResult out;
    out.axis_name = "h_m";
    out.objective_name = "PxY";
    out.fixed = spec;
    out.points.resize(heights.size());
    parallel_for(heights.size(), workers, [&](std::size_t i) {
        out.points[i] = evaluate_annulus(spec, spec.alpha, heights[i], true, opt);
        out.points[i].axis = heights[i];
    });
    return out;
}

OptimizationResult optimize_geometry(Objective objective, const SearchRanges& ranges,
                                     const Constraints& c, double rc, long budget,
                                     const RadialOptions& opt, const PhysicalConstants& constants) {
    if (ranges.n_values.empty() || ranges.epsilon_values.empty())
        throw std::invalid_argument("search ranges must be non-empty");
    if (budget < 100) throw std::invalid_argument("evaluation budget must be >= 100");
    if (!(ranges.alpha_lo_fraction > 0.0) || !(ranges.alpha_hi_fraction > ranges.alpha_lo_fraction) ||
        ranges.alpha_hi_fraction > 1.0)
        throw std::invalid_argument("alpha range fractions must satisfy 0 < lo < hi <= 1");
    if (!(ranges.h_lo > 0.0) || ranges.h_hi < ranges.h_lo)
        throw std::invalid_argument("height range must satisfy 0 < lo <= hi");
    if (ranges.coarse_points < 3) throw std::invalid_argument("coarse grid needs >= 3 points");

    OptimizationResult out;
    out.best.objective = -std::numeric_limits<double>::infinity();
    bool any_feasible = false;

    auto eval = [&](int n, double eps, double alpha, double h, const char* stage) {
        if (out.evaluations >= budget) throw BudgetExhausted{};
        ++out.evaluations;
        TraceEntry t{n, eps, alpha, h, 0.0, 0.0, 0.0, stage};
        try {
            t.r = solve_inner_radius(c.inertia, c.rho, c.delta_rho, n, alpha, eps, h);
            t.R = eps * t.r;
            PeriodicAnnulus m{c.rho, c.delta_rho, t.r, t.R, n, alpha, h};
            double p = radial_factor_p(m, rc, opt).value;
            switch (objective) {
                case Objective::p: t.objective = p; break;
                case Objective::p_times_y: t.objective = p * axial_factor_y(h, rc); break;
                case Objective::inverse_lambda:
                    t.objective = csl_prefactor(1.0, rc, constants) * p * axial_factor_y(h, rc) / c.s_th;
                    break;
            }
            any_feasible = true;
        } catch (const InvalidGeometry&) {
            t.objective = -std::numeric_limits<double>::infinity();
            t.stage += ":infeasible";
        }
        out.trace.push_back(t);
        if (t.objective > out.best.objective) out.best = t;
        return t.objective;
    };

    try {
        for (int n : ranges.n_values) {
            if (n < 1) throw std::invalid_argument("sector counts must be >= 1");
            double amax = kTwoPi / n;
            for (double eps : ranges.epsilon_values) {
                double h = std::sqrt(ranges.h_lo * ranges.h_hi);
                auto alphas = log_points(ranges.alpha_lo_fraction * amax,
                                         ranges.alpha_hi_fraction * amax, ranges.coarse_points);
                auto refine_alpha = [&](double hh, const char* stage) {
                    std::vector<double> vals;
                    for (double a : alphas) vals.push_back(eval(n, eps, a, hh, stage));
                    std::size_t i = std::max_element(vals.begin(), vals.end()) - vals.begin();
                    double lo = alphas[i == 0 ? 0 : i - 1];
                    double hi = alphas[std::min(i + 1, alphas.size() - 1)];
                    if (hi <= lo) return alphas[i];
                    return golden_log_max([&](double a) { return eval(n, eps, a, hh, "golden_alpha"); },
                                          lo, hi, 12);
                };
                double alpha = refine_alpha(h, "coarse_alpha");
                if (ranges.h_hi > ranges.h_lo) {
                    auto hs = log_points(ranges.h_lo, ranges.h_hi, ranges.coarse_points);
                    std::vector<double> vals;
                    for (double hh : hs) vals.push_back(eval(n, eps, alpha, hh, "coarse_h"));
                    std::size_t i = std::max_element(vals.begin(), vals.end()) - vals.begin();
                    double lo = hs[i == 0 ? 0 : i - 1];
                    double hi = hs[std::min(i + 1, hs.size() - 1)];
                    h = golden_log_max([&](double hh) { return eval(n, eps, alpha, hh, "golden_h"); },
                                       lo, hi, 12);
                    refine_alpha(h, "coarse_alpha_2");
                }
            }
        }
    } catch (const BudgetExhausted&) {
        out.budget_exhausted = true;
    }
    if (!any_feasible && !out.budget_exhausted)
        throw InvalidGeometry("no feasible geometry satisfies the inertia constraint");
    return out;
}

double half_cylinder_merit(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("R/rc must be > 0");
    if (x < 1.0) {
        // F = sum_{m>=3} c_m x^{2m-4}
        double x2 = x * x;
        double sum = 0.0;
        double pw = x2;  // x^{2m-4} at m = 3
        double fact_m = 6.0, fact_m2 = 1.0;
        for (int m = 3; m < 40; ++m) {
            double sgn = (m % 2 == 1) ? 1.0 : -1.0;
            double cm = sgn * (m + 2) / fact_m - sgn * 2.0 / (fact_m2 * (2.0 * m - 3.0));
            double term = cm * pw;
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            pw *= x2;
            fact_m *= m + 1;
            fact_m2 *= m - 1;
        }
        return sum;
    }
    double x2 = x * x;
    double e = x2 < 700.0 ? std::exp(-x2) * (x2 - 2.0) : 0.0;
    return (2.0 - 3.0 * x2 + e + std::sqrt(std::numbers::pi) * x2 * x * std::erf(x)) / (x2 * x2);
}

}  // namespace cslrot
