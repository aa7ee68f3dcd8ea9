#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cslrot/geometry.hpp"
#include "cslrot/spectrum.hpp"

namespace cslrot {

// lambda_max with "no constraint" represented as an empty optional.
struct BoundValue {
    std::optional<double> lambda_max;
    double p_factor = 0.0;
    double y_factor = 0.0;
    double s_th = 0.0;
};

struct BoundPoint {
    double rc = 0.0;
    std::optional<double> lambda_max;
    double p_factor = 0.0;
    double y_factor = 0.0;
    std::vector<std::string> flags;
    std::string error;
};

struct BoundCurve {
    std::vector<BoundPoint> points;
    std::string geometry_id;
    double s_th = 0.0;
    std::string convention = "two-sided S(w) = int ds e^{-iws} <tau(t) tau(t+s)>; floor S_th = 4 kB T gamma I";
    double band_low_hz = 2e-3;
    double band_high_hz = 1e-1;
    std::optional<double> omega_c;
};

BoundValue lambda_upper_bound(const MassModel& model, double rc, const NoiseBudget& floor,
                              const PhysicalConstants& constants = {}, const RadialOptions& opt = {});

// Evaluates points concurrently with up to `workers` threads; output order
// follows the grid.
BoundCurve bound_curve(const MassModel& model, const std::vector<double>& rc_grid,
                       const NoiseBudget& floor, const PhysicalConstants& constants = {},
                       const RadialOptions& opt = {}, int workers = 1);

// Indices of strict interior local minima among bounded points; flags them.
std::vector<std::size_t> mark_local_minima(BoundCurve& curve);

double rescale_thermal(double s_th_exp, double inertia_ratio, double temperature_ratio);

BoundCurve colored_bound_adjustment(const BoundCurve& curve, double omega_c, double band_lo,
                                    double band_hi);

// Points 10^(k / per_decade) lying in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int per_decade);

struct OverlayCurve {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (rc, lambda), rc increasing
};

std::vector<OverlayCurve> ingest_overlay(const std::string& path);

}  // namespace cslrot
