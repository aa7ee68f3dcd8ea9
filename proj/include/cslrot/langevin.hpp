#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cslrot/spectrum.hpp"

namespace cslrot {

// Philox4x32-10 counter-based generator. Stream (seed, index) owns the
// counter space {*, *, index_lo, index_hi}, so streams never overlap.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static Block bijection(Block counter, Key key);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    // Standard normal via Box-Muller on 53-bit uniforms.
    double normal();

    static constexpr const char* name() { return "philox4x32-10"; }

private:
    void refill();

    Key key_;
    Block counter_{};
    Block out_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct TrajectoryConfig {
    double dt = 0.1;
    double duration = 1e4;  // recorded span after burn-in
    std::uint64_t seed = 1;
    int n_trajectories = 1;
    double burn_in = 0.0;
    double theta0 = 0.0;
    double l0 = 0.0;
    bool stationary_start = false;  // draw (theta0, L0) from the stationary law
};

struct Trajectory {
    double dt = 0.0;
    std::vector<double> theta;
    std::vector<double> momentum;
};

void validate(const TrajectoryConfig& cfg, const NoiseBudget& budget);

// Kick-drift-kick on the harmonic force, then an Euler-Maruyama step for
// damping and noise. `intensity` is the two-sided white torque density D.
Trajectory simulate(const NoiseBudget& budget, double intensity, const TrajectoryConfig& cfg,
                    std::uint64_t index = 0, bool check = true);

// Same as simulate with intensity = thermal_torque_dns(budget) + s_csl.
Trajectory simulate_total(const NoiseBudget& budget, double s_csl, const TrajectoryConfig& cfg,
                          std::uint64_t index = 0);

struct PsdEstimate {
    std::vector<double> omega;
    std::vector<double> values;
    std::vector<double> rel_stderr;
    int segments = 0;
};

PsdEstimate estimate_psd(const std::vector<double>& series, double dt, std::size_t segment_length,
                         double overlap = 0.5);

struct ValidationOptions {
    std::size_t segment_length = 0;  // 0 picks the largest power of two giving >= 7 segments
    double overlap = 0.5;
    double z_threshold = 3.0;
    double pass_fraction = 0.95;
    double analytic_scale = 1.0;  // multiplies the analytic curve (negative controls)
    int workers = 1;
};

struct ValidationBin {
    double omega, estimate, stderr_abs, analytic, z;
};

struct ValidationReport {
    std::vector<ValidationBin> bins;
    double fraction_within = 0.0;
    bool pass = false;
    double variance_measured = 0.0;
    double variance_stderr = 0.0;
    double variance_expected = 0.0;
    double variance_z = 0.0;
    double intensity = 0.0;
    std::size_t segment_length = 0;
    int trajectories = 0;
    std::string generator = Philox4x32::name();
    std::string scheme = "velocity-verlet harmonic step + euler-maruyama damping/noise";
};

ValidationReport validate_spectrum(const NoiseBudget& budget, double s_csl, const TrajectoryConfig& cfg,
                                   double band_lo, double band_hi, const ValidationOptions& opt = {});

// Same, with the total white intensity D given directly.
ValidationReport validate_intensity(const NoiseBudget& budget, double intensity,
                                    const TrajectoryConfig& cfg, double band_lo, double band_hi,
                                    const ValidationOptions& opt = {});

}  // namespace cslrot
