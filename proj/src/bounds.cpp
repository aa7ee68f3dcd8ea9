#include "cslrot/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cslrot/errors.hpp"
#include "cslrot/io.hpp"
#include "cslrot/parallel.hpp"

namespace cslrot {

BoundValue lambda_upper_bound(const MassModel& model, double rc, const NoiseBudget& floor,
                              const PhysicalConstants& constants, const RadialOptions& opt) {
    BoundValue out;
    out.s_th = thermal_torque_dns(floor, constants);
    RadialResult p = radial_factor_p(model, rc, opt);
    out.p_factor = p.value;
    out.y_factor = axial_factor_y(height_of(model), rc);
    double py = out.p_factor * out.y_factor;
    // A non-positive P means no angular structure the noise can couple to.
    if (!(py > 0.0) || out.p_factor <= p.abs_error) return out;
    out.lambda_max = out.s_th / (csl_prefactor(1.0, rc, constants) * py);
    return out;
}

BoundCurve bound_curve(const MassModel& model, const std::vector<double>& rc_grid,
                       const NoiseBudget& floor, const PhysicalConstants& constants,
                       const RadialOptions& opt, int workers) {
    for (std::size_t i = 0; i < rc_grid.size(); ++i) {
        if (!(rc_grid[i] > 0.0)) throw std::invalid_argument("rc grid must be positive");
        if (i > 0 && !(rc_grid[i] > rc_grid[i - 1]))
            throw std::invalid_argument("rc grid must be strictly increasing");
    }
    validate(model);
    BoundCurve curve;
    curve.s_th = thermal_torque_dns(floor, constants);
    curve.points.resize(rc_grid.size());
    parallel_for(rc_grid.size(), workers, [&](std::size_t i) {
        BoundPoint& pt = curve.points[i];
        pt.rc = rc_grid[i];
        try {
            BoundValue v = lambda_upper_bound(model, pt.rc, floor, constants, opt);
            pt.lambda_max = v.lambda_max;
            pt.p_factor = v.p_factor;
            pt.y_factor = v.y_factor;
            pt.flags.push_back(v.lambda_max ? "ok" : "unbounded");
        } catch (const ConvergenceError& e) {
            pt.flags.push_back("convergence_failure");
            pt.error = e.what();
        }
    });
    mark_local_minima(curve);
    return curve;
}

std::vector<std::size_t> mark_local_minima(BoundCurve& curve) {
    std::vector<std::size_t> out;
    auto& pts = curve.points;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        if (!pts[i].lambda_max || !pts[i - 1].lambda_max || !pts[i + 1].lambda_max) continue;
        double v = *pts[i].lambda_max;
        if (v < *pts[i - 1].lambda_max && v < *pts[i + 1].lambda_max) {
            out.push_back(i);
            if (std::find(pts[i].flags.begin(), pts[i].flags.end(), "local_min") == pts[i].flags.end())
                pts[i].flags.push_back("local_min");
        }
    }
    return out;
}

double rescale_thermal(double s_th_exp, double inertia_ratio, double temperature_ratio) {
    if (!(s_th_exp > 0.0) || !(inertia_ratio > 0.0) || !(temperature_ratio > 0.0))
        throw std::invalid_argument("thermal rescaling needs positive floor and ratios");
    return s_th_exp * inertia_ratio * temperature_ratio;
}

BoundCurve colored_bound_adjustment(const BoundCurve& curve, double omega_c, double band_lo,
                                    double band_hi) {
    if (!(band_lo > 0.0) || !(band_hi >= band_lo))
        throw std::invalid_argument("analysis band must be positive and ordered");
    // The multiplier decreases with omega, so the worst case is the top of the band.
    double worst = std::min(colored_multiplier(band_lo, omega_c), colored_multiplier(band_hi, omega_c));
    BoundCurve out = curve;
    out.omega_c = omega_c;
    for (auto& p : out.points)
        if (p.lambda_max) *p.lambda_max /= worst;
    return out;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1)
        throw std::invalid_argument("log grid needs 0 < lo <= hi and per_decade >= 1");
    long k0 = static_cast<long>(std::ceil(per_decade * std::log10(lo) - 1e-9));
    long k1 = static_cast<long>(std::floor(per_decade * std::log10(hi) + 1e-9));
    std::vector<double> out;
    for (long k = k0; k <= k1; ++k) out.push_back(std::pow(10.0, static_cast<double>(k) / per_decade));
    return out;
}

std::vector<OverlayCurve> ingest_overlay(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open overlay file '" + path + "'");
    std::vector<OverlayCurve> curves;
    std::map<std::string, std::size_t> index;
    std::string line;
    int lineno = 0;
    bool header = false;
    auto fail = [&](const std::string& msg) {
        throw InputError(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header) {
            if (t != "label,rc_m,lambda_s^-1") fail("expected header 'label,rc_m,lambda_s^-1'");
            header = true;
            continue;
        }
        auto fields = split(t, ',');
        if (fields.size() != 3) fail("expected 3 fields, got " + std::to_string(fields.size()));
        std::string label = trim(fields[0]);
        if (label.empty()) fail("empty label");
        auto rc = parse_double(trim(fields[1]));
        auto lam = parse_double(trim(fields[2]));
        if (!rc || !lam) fail("malformed number");
        if (!(*rc > 0.0) || !std::isfinite(*rc)) fail("rc must be positive and finite");
        if (!(*lam > 0.0) || !std::isfinite(*lam)) fail("lambda must be positive and finite");
        auto it = index.find(label);
        if (it == index.end()) {
            it = index.emplace(label, curves.size()).first;
            curves.push_back({label, {}});
        }
        curves[it->second].points.emplace_back(*rc, *lam);
    }
    for (auto& c : curves) {
        std::sort(c.points.begin(), c.points.end());
        for (std::size_t i = 1; i < c.points.size(); ++i)
            if (c.points[i].first == c.points[i - 1].first)
                throw InputError(path + ": duplicate rc in overlay curve '" + c.label + "'");
    }
    return curves;
}

}  // namespace cslrot
