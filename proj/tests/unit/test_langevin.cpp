#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "cslrot/langevin.hpp"
#include "doctest.h"

using namespace cslrot;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace {

NoiseBudget unit_budget(double gamma = 0.05) {
    NoiseBudget b;
    b.inertia = 1.0;
    b.omega0 = 1.0;
    b.gamma = gamma;
    return b;
}

double deterministic_error(double dt) {
    NoiseBudget b = unit_budget(0.0);
    TrajectoryConfig cfg;
    cfg.dt = dt;
    cfg.duration = 100.0;
    cfg.theta0 = 1.0;
    Trajectory t = simulate(b, 0.0, cfg);
    std::size_t i = static_cast<std::size_t>(std::lround(10.0 / dt));
    return std::abs(t.theta[i] - std::cos(10.0));
}

// Mean of theta^2 over one stationary trajectory.
double mean_square(const Trajectory& t) {
    double s = 0.0;
    for (double v : t.theta) s += v * v;
    return s / static_cast<double>(t.theta.size());
}

struct VarianceStats {
    double mean, stderr_;
};

VarianceStats variance_over(const NoiseBudget& b, double d, const TrajectoryConfig& cfg) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < cfg.n_trajectories; ++i) {
        double m = mean_square(simulate(b, d, cfg, static_cast<std::uint64_t>(i)));
        s += m;
        s2 += m * m;
    }
    double n = cfg.n_trajectories, mean = s / n;
    return {mean, std::sqrt((s2 / n - mean * mean) / (n - 1.0))};
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32::bijection(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::bijection(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::bijection(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox streams") {
    Philox4x32 a(42, 0), b(42, 0), c(42, 1), d(43, 0);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        auto x = a();
        CHECK(x == b());
        seen.insert(x);
        seen.insert(c());
        seen.insert(d());
    }
    CHECK(seen.size() == 3000);

    Philox4x32 g(5, 0);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double v = g.normal();
        s += v;
        s2 += v * v;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("trajectories are reproducible and independent across indices") {
    NoiseBudget b = unit_budget();
    TrajectoryConfig cfg;
    cfg.dt = 0.05;
    cfg.duration = 200.0;
    cfg.seed = 11;
    Trajectory t1 = simulate(b, 1.0, cfg, 3), t2 = simulate(b, 1.0, cfg, 3), t3 = simulate(b, 1.0, cfg, 4);
    CHECK(t1.theta == t2.theta);
    CHECK(t1.momentum == t2.momentum);
    CHECK(t1.theta != t3.theta);
    CHECK(t1.theta.size() == 4001);
}

TEST_CASE("undamped oscillator and convergence order") {
    double e1 = deterministic_error(0.01), e2 = deterministic_error(0.005);
    CHECK(e1 < 1e-3 * std::abs(std::cos(10.0)));
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("config validation") {
    NoiseBudget b = unit_budget();
    TrajectoryConfig cfg;
    cfg.dt = 0.1;
    cfg.duration = 200.0;
    CHECK_THROWS_AS(validate(cfg, b), std::invalid_argument);
    cfg.dt = 0.05;
    cfg.duration = 50.0;
    CHECK_THROWS_AS(validate(cfg, b), std::invalid_argument);
    cfg.duration = 200.0;
    CHECK_NOTHROW(validate(cfg, b));
    CHECK_THROWS(simulate(b, -1.0, cfg));
}

TEST_CASE("stationary variance and linearity in the intensity") {
    NoiseBudget b = unit_budget();
    TrajectoryConfig cfg;
    cfg.dt = 0.05;
    cfg.duration = 4000.0;
    cfg.n_trajectories = 40;
    cfg.stationary_start = true;
    const double d = 1.0, expected = d / (2.0 * b.gamma);
    VarianceStats v1 = variance_over(b, d, cfg);
    CHECK(std::abs(v1.mean - expected) < 3.0 * v1.stderr_);
    cfg.seed = 2;
    VarianceStats v3 = variance_over(b, 3.0 * d, cfg);
    CHECK(std::abs(v3.mean - 3.0 * expected) < 3.0 * v3.stderr_);
    CHECK(v3.mean / v1.mean == doctest::Approx(3.0).epsilon(0.1));

    double s_th = thermal_torque_dns(b);
    Trajectory th = simulate_total(b, 0.0, cfg, 0), both = simulate_total(b, s_th, cfg, 0);
    CHECK(mean_square(both) / mean_square(th) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("variance z-scores over independent runs") {
    NoiseBudget b = unit_budget();
    TrajectoryConfig cfg;
    cfg.dt = 0.05;
    cfg.duration = 2000.0;
    cfg.n_trajectories = 10;
    cfg.stationary_start = true;
    const double expected = 1.0 / (2.0 * b.gamma);
    double zsum = 0.0, zmax = 0.0;
    for (int run = 0; run < 50; ++run) {
        cfg.seed = 1000 + static_cast<std::uint64_t>(run);
        VarianceStats v = variance_over(b, 1.0, cfg);
        double z = (v.mean - expected) / v.stderr_;
        zsum += z;
        zmax = std::max(zmax, std::abs(z));
    }
    INFO("mean z " << zsum / 50 << " max |z| " << zmax);
    CHECK(std::abs(zsum / 50) < 0.3);
    CHECK(zmax < 4.0);
}

TEST_CASE("psd estimator") {
    const double dt = 0.01, d = 2.5;
    const std::size_t n = 1 << 16, seg = 1024;
    Philox4x32 g(9, 0);
    std::vector<double> white(n);
    for (double& v : white) v = std::sqrt(d / dt) * g.normal();
    PsdEstimate w = estimate_psd(white, dt, seg);
    CHECK(w.omega.size() == seg / 2 + 1);
    CHECK(w.omega[1] == doctest::Approx(kTwoPi / (seg * dt)).epsilon(1e-12));
    int inside = 0, total = 0;
    for (std::size_t k = 1; k + 1 < w.values.size(); ++k, ++total)
        if (std::abs(w.values[k] - d) <= 3.0 * w.rel_stderr[k] * w.values[k]) ++inside;
    CHECK(inside >= 0.97 * total);

    std::vector<double> sine(n);
    const std::size_t bin = 100;
    const double om = kTwoPi * bin / (seg * dt);
    for (std::size_t i = 0; i < n; ++i) sine[i] = std::sin(om * dt * static_cast<double>(i));
    PsdEstimate s = estimate_psd(sine, dt, seg);
    CHECK(std::max_element(s.values.begin(), s.values.end()) - s.values.begin() == bin);

    PsdEstimate z = estimate_psd(std::vector<double>(n, 0.0), dt, seg);
    for (double v : z.values) CHECK(v == 0.0);

    CHECK_THROWS(estimate_psd(std::vector<double>(2 * seg, 1.0), dt, seg));
}

TEST_CASE("spectrum validation and its negative control") {
    NoiseBudget b;
    b.temperature = 300.0;
    b.inertia = 9e-6;
    b.omega0 = kTwoPi * 1.8e-2;
    b.gamma = b.omega0 / 10.0;
    TrajectoryConfig cfg;
    cfg.dt = 0.2;
    cfg.n_trajectories = 20;
    cfg.seed = 3;
    cfg.stationary_start = true;
    cfg.duration = 16384 * cfg.dt * 4.5;
    ValidationOptions vo;
    vo.segment_length = 16384;
    const double lo = kTwoPi * 2e-3, hi = kTwoPi * 1e-1;
    double s_th = thermal_torque_dns(b);
    ValidationReport ok = validate_spectrum(b, s_th, cfg, lo, hi, vo);
    CHECK(ok.pass);
    CHECK(ok.fraction_within >= 0.95);

    vo.analytic_scale = 0.5;
    ValidationReport bad = validate_spectrum(b, s_th, cfg, lo, hi, vo);
    CHECK_FALSE(bad.pass);

    vo.analytic_scale = 1.0;
    CHECK_THROWS(validate_spectrum(b, s_th, cfg, 1e-6, hi, vo));
    CHECK_THROWS(validate_spectrum(b, s_th, cfg, lo, 20.0, vo));
}

TEST_CASE("stronger damping lowers the resonance a hundredfold") {
    NoiseBudget b;
    b.inertia = 1.0;
    b.omega0 = 1.0;
    b.gamma = 0.05;
    NoiseBudget b10 = b;
    b10.gamma *= 10.0;
    const double d = 1.0;
    CHECK(angular_psd(1.0, b, d) / angular_psd(1.0, b10, d) == doctest::Approx(100.0).epsilon(1e-12));

    TrajectoryConfig cfg;
    cfg.dt = 0.05;
    cfg.n_trajectories = 8;
    cfg.stationary_start = true;
    cfg.duration = 32768 * cfg.dt * 4.5;
    ValidationOptions vo;
    vo.segment_length = 32768;
    ValidationReport narrow = validate_intensity(b, d, cfg, 0.5, 1.5, vo);
    ValidationReport wide = validate_intensity(b10, d, cfg, 0.5, 1.5, vo);
    CHECK(narrow.pass);
    CHECK(wide.pass);
    auto at_resonance = [](const ValidationReport& r) {
        return *std::min_element(r.bins.begin(), r.bins.end(), [](const auto& x, const auto& y) {
            return std::abs(x.omega - 1.0) < std::abs(y.omega - 1.0);
        });
    };
    ValidationBin n0 = at_resonance(narrow), w0 = at_resonance(wide);
    double analytic = n0.analytic / w0.analytic, measured = n0.estimate / w0.estimate;
    double rel_se = std::hypot(n0.stderr_abs / n0.estimate, w0.stderr_abs / w0.estimate);
    INFO("analytic ratio " << analytic << " measured " << measured << " rel se " << rel_se);
    CHECK(analytic == doctest::Approx(100.0).epsilon(0.05));
    CHECK(std::abs(measured / analytic - 1.0) < 3.0 * rel_se);
}
