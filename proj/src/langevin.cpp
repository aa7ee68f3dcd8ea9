#include "cslrot/langevin.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "cslrot/errors.hpp"
#include "cslrot/parallel.hpp"

namespace cslrot {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {
    counter_[2] = static_cast<std::uint32_t>(stream);
    counter_[3] = static_cast<std::uint32_t>(stream >> 32);
}

Philox4x32::Block Philox4x32::bijection(Block c, Key k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += 0x9E3779B9u;
            k[1] += 0xBB67AE85u;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(0xD2511F53u, c[0], hi0, lo0);
        mulhilo(0xCD9E8D57u, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

void Philox4x32::refill() {
    out_ = bijection(counter_, key_);
    if (++counter_[0] == 0) ++counter_[1];
    used_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
    if (used_ > 2) refill();
    std::uint64_t v = (static_cast<std::uint64_t>(out_[used_]) << 32) | out_[used_ + 1];
    used_ += 2;
    return v;
}

double Philox4x32::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    double u1 = static_cast<double>(((*this)() >> 11) + 1) * scale;  // (0, 1]
    double u2 = static_cast<double>((*this)() >> 11) * scale;        // [0, 1)
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = kTwoPi * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
}

void validate(const TrajectoryConfig& cfg, const NoiseBudget& b) {
    if (!(b.inertia > 0.0) || !(b.omega0 > 0.0) || !(b.gamma >= 0.0))
        throw std::invalid_argument("simulation needs inertia > 0, omega0 > 0, gamma >= 0");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (cfg.dt * std::max(b.omega0, b.gamma) > 0.05)
        throw std::invalid_argument("dt * max(omega0, gamma) must be <= 0.05");
    if (cfg.duration < 100.0 / b.omega0)
        throw std::invalid_argument("duration after burn-in must be >= 100 / omega0");
    if (cfg.n_trajectories < 1) throw std::invalid_argument("n_trajectories must be >= 1");
    if (!(cfg.burn_in >= 0.0)) throw std::invalid_argument("burn_in must be >= 0");
    if (cfg.stationary_start && !(b.gamma > 0.0))
        throw std::invalid_argument("stationary start needs gamma > 0");
}

Trajectory simulate(const NoiseBudget& b, double intensity, const TrajectoryConfig& cfg,
                    std::uint64_t index, bool check) {
    if (check) validate(cfg, b);
    if (!(intensity >= 0.0)) throw std::invalid_argument("torque intensity must be >= 0");
    Philox4x32 rng(cfg.seed, index);
    const double dt = cfg.dt;
    const double k = b.inertia * b.omega0 * b.omega0;
    const double kick = 0.5 * dt * k;
    const double drift = dt / b.inertia;
    const double damp = b.gamma * dt;
    const double noise = std::sqrt(intensity * dt);
    double theta = cfg.theta0;
    double mom = cfg.l0;
    if (cfg.stationary_start) {
        double var_l = intensity / (2.0 * b.gamma);
        theta = std::sqrt(var_l) / (b.inertia * b.omega0) * rng.normal();
        mom = std::sqrt(var_l) * rng.normal();
    }
    auto step = [&] {
        mom -= kick * theta;
        theta += drift * mom;
        mom -= kick * theta;
        mom += -damp * mom + (noise > 0.0 ? noise * rng.normal() : 0.0);
    };
    long n_burn = std::lround(cfg.burn_in / dt);
    long n_rec = std::lround(cfg.duration / dt);
    for (long i = 0; i < n_burn; ++i) step();
    Trajectory out;
    out.dt = dt;
    out.theta.resize(n_rec + 1);
    out.momentum.resize(n_rec + 1);
    out.theta[0] = theta;
    out.momentum[0] = mom;
    for (long i = 1; i <= n_rec; ++i) {
        step();
        out.theta[i] = theta;
        out.momentum[i] = mom;
    }
    return out;
}

Trajectory simulate_total(const NoiseBudget& budget, double s_csl, const TrajectoryConfig& cfg,
                          std::uint64_t index) {
    return simulate(budget, thermal_torque_dns(budget) + s_csl, cfg, index);
}

PsdEstimate estimate_psd(const std::vector<double>& series, double dt, std::size_t seg, double overlap) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (seg < 8) throw std::invalid_argument("segment length must be >= 8");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw std::invalid_argument("overlap must lie in [0, 1)");
    std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(seg * (1.0 - overlap))));
    if (series.size() < seg) throw InputError("insufficient data for one PSD segment");
    std::size_t count = (series.size() - seg) / hop + 1;
    if (count < 4) throw InputError("insufficient data: fewer than 4 PSD segments");

    std::vector<double> window(seg);
    double wsum = 0.0;
    for (std::size_t i = 0; i < seg; ++i) {
        double s = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(seg));
        window[i] = s * s;
        wsum += window[i] * window[i];
    }
    const std::size_t bins = seg / 2 + 1;
    double* in = fftw_alloc_real(seg);
    fftw_complex* out = fftw_alloc_complex(bins);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(seg), in, out, FFTW_ESTIMATE);
    }
    std::vector<double> sum(bins, 0.0), sum2(bins, 0.0);
    const double norm = dt / wsum;
    for (std::size_t s = 0; s < count; ++s) {
        const double* x = series.data() + s * hop;
        for (std::size_t i = 0; i < seg; ++i) in[i] = window[i] * x[i];
        fftw_execute_dft_r2c(plan, in, out);
        for (std::size_t k = 0; k < bins; ++k) {
            double p = norm * (out[k][0] * out[k][0] + out[k][1] * out[k][1]);
            sum[k] += p;
            sum2[k] += p * p;
        }
    }
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);

    PsdEstimate est;
    est.segments = static_cast<int>(count);
    est.omega.resize(bins);
    est.values.resize(bins);
    est.rel_stderr.resize(bins);
    double kn = static_cast<double>(count);
    for (std::size_t k = 0; k < bins; ++k) {
        est.omega[k] = kTwoPi * static_cast<double>(k) / (static_cast<double>(seg) * dt);
        double mean = sum[k] / kn;
        double var = std::max(0.0, sum2[k] / kn - mean * mean) * kn / (kn - 1.0);
        est.values[k] = mean;
        est.rel_stderr[k] = mean > 0.0 ? std::sqrt(var / kn) / mean : 0.0;
    }
    return est;
}

ValidationReport validate_spectrum(const NoiseBudget& budget, double s_csl, const TrajectoryConfig& cfg,
                                   double band_lo, double band_hi, const ValidationOptions& opt) {
    return validate_intensity(budget, thermal_torque_dns(budget) + s_csl, cfg, band_lo, band_hi, opt);
}

ValidationReport validate_intensity(const NoiseBudget& budget, double intensity,
                                    const TrajectoryConfig& cfg, double band_lo, double band_hi,
                                    const ValidationOptions& opt) {
    validate(cfg, budget);
    if (!(budget.gamma > 0.0)) throw std::invalid_argument("validation needs gamma > 0");
    std::size_t samples = static_cast<std::size_t>(std::lround(cfg.duration / cfg.dt)) + 1;
    std::size_t seg = opt.segment_length;
    if (seg == 0) {
        seg = 8;
        while (seg * 2 * 4 <= samples) seg *= 2;
    }
    double res = kTwoPi / (static_cast<double>(seg) * cfg.dt);
    if (!(band_lo >= res) || !(band_hi <= std::numbers::pi / cfg.dt) || !(band_hi > band_lo))
        throw std::invalid_argument("analysis band is not resolvable with this segment length and dt");

    const int n = cfg.n_trajectories;
    std::vector<PsdEstimate> psd(n);
    std::vector<double> var(n);
    std::vector<std::string> errors(n);
    parallel_for(static_cast<std::size_t>(n), opt.workers, [&](std::size_t i) {
        try {
            Trajectory t = simulate(budget, intensity, cfg, i, false);
            double acc = 0.0;
            for (double th : t.theta) acc += th * th;
            var[i] = acc / static_cast<double>(t.theta.size());
            psd[i] = estimate_psd(t.theta, cfg.dt, seg, opt.overlap);
            if (i > 0) {
                std::vector<double>().swap(psd[i].omega);
                std::vector<double>().swap(psd[i].rel_stderr);
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("trajectory failed: " + e);

    ValidationReport rep;
    rep.intensity = intensity;
    rep.segment_length = seg;
    rep.trajectories = n;
    const double nn = n;
    std::size_t within = 0;
    for (std::size_t k = 0; k < psd[0].omega.size(); ++k) {
        double w = psd[0].omega[k];
        if (w < band_lo || w > band_hi) continue;
        double m = 0.0, m2 = 0.0;
        for (const auto& p : psd) {
            m += p.values[k];
            m2 += p.values[k] * p.values[k];
        }
        m /= nn;
        double sd = std::sqrt(std::max(0.0, m2 / nn - m * m) * nn / (nn - 1.0));
        double se = sd / std::sqrt(nn);
        double a = opt.analytic_scale * angular_psd(w, budget, intensity);
        double z = se > 0.0 ? (m - a) / se : (m == a ? 0.0 : INFINITY);
        rep.bins.push_back({w, m, se, a, z});
        if (std::abs(z) <= opt.z_threshold) ++within;
    }
    rep.fraction_within = rep.bins.empty() ? 0.0 : static_cast<double>(within) / rep.bins.size();
    rep.pass = !rep.bins.empty() && rep.fraction_within >= opt.pass_fraction;

    double vm = 0.0, vm2 = 0.0;
    for (double v : var) {
        vm += v;
        vm2 += v * v;
    }
    vm /= nn;
    rep.variance_measured = vm;
    rep.variance_stderr = n > 1 ? std::sqrt(std::max(0.0, vm2 / nn - vm * vm) / (nn - 1.0)) : 0.0;
    rep.variance_expected =
        intensity / (2.0 * budget.gamma * budget.inertia * budget.inertia * budget.omega0 * budget.omega0);
    rep.variance_z = rep.variance_stderr > 0.0
                         ? (rep.variance_measured - rep.variance_expected) / rep.variance_stderr
                         : 0.0;
    return rep;
}

}  // namespace cslrot
