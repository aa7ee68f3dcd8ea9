#include "cslrot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "cslrot/errors.hpp"

namespace cslrot {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidGeometry(what);
}

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

// Fraction of each period covered by the heavy sector, snapped so that the
// endpoints alpha = 0 and alpha = 2 pi / n are exact.
double duty_fraction(int n, double alpha) {
    double d = alpha * n / kTwoPi;
    constexpr double snap = 8.0 * std::numeric_limits<double>::epsilon();
    if (std::abs(d - 1.0) <= snap) return 1.0;
    if (d <= snap) return 0.0;
    return std::clamp(d, 0.0, 1.0);
}

bool in_sector(double theta, int n, double duty) {
    if (duty >= 1.0) return true;
    if (duty <= 0.0) return false;
    double u = theta * n / kTwoPi;
    return u - std::floor(u) < duty;
}

double reduce_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    return t < 0.0 ? t + kTwoPi : t;
}

void check_ring(const SectorRing& ring, const std::string& label) {
    require(finite_all({ring.r_inner, ring.r_outer}), label + " radii must be finite");
    require(ring.n_sectors >= 1, label + ".n_sectors must be >= 1");
    require(ring.r_inner >= 0.0 && ring.r_inner < ring.r_outer,
            label + ".r_inner must satisfy 0 <= r_inner < r_outer");
}

}  // namespace

void validate(const MassModel& model) {
    std::visit(
        overloaded{
            [](const HomogeneousDisk& m) {
                require(finite_all({m.rho, m.radius, m.height}), "disk parameters must be finite");
                require(m.rho >= 0.0, "disk.rho must be >= 0");
                require(m.radius > 0.0, "disk.radius must be > 0");
                require(m.height > 0.0, "disk.height must be > 0");
            },
            [](const PeriodicAnnulus& m) {
                require(finite_all({m.rho, m.delta_rho, m.r_inner, m.r_outer, m.alpha, m.height}),
                        "annulus parameters must be finite");
                require(m.rho >= 0.0, "annulus.rho must be >= 0");
                require(m.delta_rho >= 0.0, "annulus.delta_rho must be >= 0");
                require(m.r_inner >= 0.0 && m.r_inner < m.r_outer,
                        "annulus.r_inner must satisfy 0 <= r_inner < r_outer");
                require(m.n_sectors >= 1, "annulus.n_sectors must be >= 1");
                require(m.alpha >= 0.0 && m.alpha <= (kTwoPi / m.n_sectors) * (1.0 + 1e-12),
                        "annulus.alpha must lie in [0, 2*pi/n_sectors]");
                require(m.height > 0.0, "annulus.height must be > 0");
            },
            [](const TwoAnnuli& m) {
                require(finite_all({m.rho, m.delta_rho, m.r_core, m.r_outer_total, m.height}),
                        "two_annuli parameters must be finite");
                require(m.rho >= 0.0, "two_annuli.rho must be >= 0");
                require(m.delta_rho >= 0.0, "two_annuli.delta_rho must be >= 0");
                check_ring(m.inner, "two_annuli.inner");
                check_ring(m.outer, "two_annuli.outer");
                require(m.r_core >= 0.0 && m.r_core <= m.inner.r_inner &&
                            m.inner.r_outer <= m.outer.r_inner &&
                            m.outer.r_outer <= m.r_outer_total,
                        "two_annuli radii must satisfy r_core <= inner.r_inner < inner.r_outer "
                        "<= outer.r_inner < outer.r_outer <= r_outer_total");
                require(m.height > 0.0, "two_annuli.height must be > 0");
            },
            [](const HalfCylinder& m) {
                require(finite_all({m.rho, m.delta_rho, m.radius, m.height}),
                        "half_cylinder parameters must be finite");
                require(m.rho >= 0.0, "half_cylinder.rho must be >= 0");
                require(m.delta_rho >= 0.0, "half_cylinder.delta_rho must be >= 0");
                require(m.radius > 0.0, "half_cylinder.radius must be > 0");
                require(m.height > 0.0, "half_cylinder.height must be > 0");
            }},
        model);
}

std::string kind_name(const MassModel& model) {
    return std::visit(overloaded{[](const HomogeneousDisk&) { return std::string("homogeneous_disk"); },
                                 [](const PeriodicAnnulus&) { return std::string("periodic_annulus"); },
                                 [](const TwoAnnuli&) { return std::string("two_annuli"); },
                                 [](const HalfCylinder&) { return std::string("half_cylinder"); }},
                      model);
}

double moment_of_inertia(const MassModel& model) {
    validate(model);
    return std::visit(
        overloaded{
            [](const HomogeneousDisk& m) { return kPi * m.rho * m.height * std::pow(m.radius, 4) / 2.0; },
            [](const PeriodicAnnulus& m) {
                return kPi * m.rho * m.height * std::pow(m.r_outer, 4) / 2.0 +
                       m.n_sectors * m.alpha * m.delta_rho * m.height *
                           (std::pow(m.r_outer, 4) - std::pow(m.r_inner, 4)) / 4.0;
            },
            [](const TwoAnnuli& m) {
                auto ring = [&](const SectorRing& s) {
                    return kPi * m.delta_rho * m.height *
                           (std::pow(s.r_outer, 4) - std::pow(s.r_inner, 4)) / 4.0;
                };
                return kPi * m.rho * m.height *
                           (std::pow(m.r_outer_total, 4) - std::pow(m.r_core, 4)) / 2.0 +
                       ring(m.inner) + ring(m.outer);
            },
            [](const HalfCylinder& m) {
                double r4 = std::pow(m.radius, 4);
                return kPi * m.rho * m.height * r4 / 2.0 + kPi * m.delta_rho * m.height * r4 / 4.0;
            }},
        model);
}

double total_mass(const MassModel& model) {
    validate(model);
    return std::visit(
        overloaded{
            [](const HomogeneousDisk& m) { return kPi * m.rho * m.height * m.radius * m.radius; },
            [](const PeriodicAnnulus& m) {
                return kPi * m.rho * m.height * m.r_outer * m.r_outer +
                       m.n_sectors * m.alpha * m.delta_rho * m.height *
                           (m.r_outer * m.r_outer - m.r_inner * m.r_inner) / 2.0;
            },
            [](const TwoAnnuli& m) {
                auto ring = [&](const SectorRing& s) {
                    return kPi * m.delta_rho * m.height *
                           (s.r_outer * s.r_outer - s.r_inner * s.r_inner) / 2.0;
                };
                return kPi * m.rho * m.height *
                           (m.r_outer_total * m.r_outer_total - m.r_core * m.r_core) +
                       ring(m.inner) + ring(m.outer);
            },
            [](const HalfCylinder& m) {
                double r2 = m.radius * m.radius;
                return kPi * m.rho * m.height * r2 + kPi * m.delta_rho * m.height * r2 / 2.0;
            }},
        model);
}

double height_of(const MassModel& model) {
    return std::visit([](const auto& m) { return m.height; }, model);
}

double outer_radius(const MassModel& model) {
    return std::visit(overloaded{[](const HomogeneousDisk& m) { return m.radius; },
                                 [](const PeriodicAnnulus& m) { return m.r_outer; },
                                 [](const TwoAnnuli& m) { return m.r_outer_total; },
                                 [](const HalfCylinder& m) { return m.radius; }},
                      model);
}

double excess_density(const MassModel& model) {
    return std::visit(overloaded{[](const HomogeneousDisk&) { return 0.0; },
                                 [](const auto& m) { return m.delta_rho; }},
                      model);
}

double max_density(const MassModel& model) {
    return std::visit(overloaded{[](const HomogeneousDisk& m) { return m.rho; },
                                 [](const auto& m) { return m.rho + m.delta_rho; }},
                      model);
}

MassModel with_delta_rho(MassModel model, double delta_rho) {
    std::visit(overloaded{[](HomogeneousDisk&) {}, [&](auto& m) { m.delta_rho = delta_rho; }}, model);
    return model;
}

std::vector<AngularRing> angular_rings(const MassModel& model) {
    return std::visit(
        overloaded{
            [](const HomogeneousDisk&) { return std::vector<AngularRing>{}; },
            [](const PeriodicAnnulus& m) {
                return std::vector<AngularRing>{
                    {m.r_inner, m.r_outer, m.n_sectors, duty_fraction(m.n_sectors, m.alpha)}};
            },
            [](const TwoAnnuli& m) {
                return std::vector<AngularRing>{
                    {m.inner.r_inner, m.inner.r_outer, m.inner.n_sectors, 0.5},
                    {m.outer.r_inner, m.outer.r_outer, m.outer.n_sectors, 0.5}};
            },
            [](const HalfCylinder& m) { return std::vector<AngularRing>{{0.0, m.radius, 1, 0.5}}; }},
        model);
}

double density_at(const MassModel& model, double r_perp, double theta) {
    double th = reduce_angle(theta);
    return std::visit(
        overloaded{
            [&](const HomogeneousDisk& m) { return r_perp <= m.radius ? m.rho : 0.0; },
            [&](const PeriodicAnnulus& m) {
                if (r_perp > m.r_outer) return 0.0;
                double d = duty_fraction(m.n_sectors, m.alpha);
                bool heavy = r_perp >= m.r_inner && in_sector(th, m.n_sectors, d);
                return m.rho + (heavy ? m.delta_rho : 0.0);
            },
            [&](const TwoAnnuli& m) {
                if (r_perp < m.r_core || r_perp > m.r_outer_total) return 0.0;
                double v = m.rho;
                for (const SectorRing* s : {&m.inner, &m.outer})
                    if (r_perp >= s->r_inner && r_perp <= s->r_outer &&
                        in_sector(th, s->n_sectors, 0.5))
                        v += m.delta_rho;
                return v;
            },
            [&](const HalfCylinder& m) {
                if (r_perp > m.radius) return 0.0;
                return m.rho + (th < kPi ? m.delta_rho : 0.0);
            }},
        model);
}

std::vector<double> angular_breakpoints(const MassModel& model, double r_perp) {
    std::vector<double> out;
    if (excess_density(model) == 0.0) return out;
    for (const auto& ring : angular_rings(model)) {
        if (r_perp < ring.r_inner || r_perp > ring.r_outer) continue;
        if (ring.duty <= 0.0 || ring.duty >= 1.0) continue;
        for (int j = 0; j < ring.n_sectors; ++j) {
            out.push_back(kTwoPi * j / ring.n_sectors);
            out.push_back(kTwoPi * (j + ring.duty) / ring.n_sectors);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int angular_symmetry(const MassModel& model) {
    bool structured = false;
    for (const auto& ring : angular_rings(model)) structured = structured || (ring.duty > 0.0 && ring.duty < 1.0);
    if (!structured || excess_density(model) == 0.0) return 1;
    return std::visit(overloaded{[](const HomogeneousDisk&) { return 1; },
                                 [](const PeriodicAnnulus& m) { return m.n_sectors; },
                                 [](const TwoAnnuli& m) {
                                     return std::gcd(m.inner.n_sectors, m.outer.n_sectors);
                                 },
                                 [](const HalfCylinder&) { return 1; }},
                      model);
}

std::vector<double> radial_breakpoints(const MassModel& model) {
    return std::visit(
        overloaded{[](const HomogeneousDisk& m) { return std::vector<double>{m.radius}; },
                   [](const PeriodicAnnulus& m) { return std::vector<double>{m.r_inner, m.r_outer}; },
                   [](const TwoAnnuli& m) {
                       return std::vector<double>{m.r_core, m.inner.r_inner, m.inner.r_outer,
                                                  m.outer.r_inner, m.outer.r_outer, m.r_outer_total};
                   },
                   [](const HalfCylinder& m) { return std::vector<double>{m.radius}; }},
        model);
}

double solve_inner_radius(double inertia_target, double rho, double delta_rho, int n,
                          double alpha, double epsilon, double h) {
    require(inertia_target > 0.0 && std::isfinite(inertia_target), "inertia target must be > 0");
    require(epsilon > 1.0 && std::isfinite(epsilon), "epsilon (R/r) must be > 1");
    require(h > 0.0, "height must be > 0");
    require(n >= 1, "n_sectors must be >= 1");
    double e4 = std::pow(epsilon, 4);
    double denom = kPi * rho * h * e4 / 2.0 + n * alpha * delta_rho * h * (e4 - 1.0) / 4.0;
    require(denom > 0.0 && std::isfinite(denom),
            "inertia constraint is infeasible: non-positive denominator");
    return std::pow(inertia_target / denom, 0.25);
}

}  // namespace cslrot
