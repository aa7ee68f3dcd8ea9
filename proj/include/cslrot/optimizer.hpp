#pragma once

#include <string>
#include <vector>

#include "cslrot/geometry.hpp"
#include "cslrot/spectrum.hpp"

namespace cslrot {

// Parameters held fixed along a single-annulus scan.
struct AnnulusScanSpec {
    int n = 100;
    double epsilon = 2.0;
    double inertia = 9e-6;
    double height = 1e-3;  // used by alpha scans
    double alpha = 5e-3;   // used by height scans
    double rc = 1e-4;
    double rho = 1.2e3;
    double delta_rho = 19.3e3;
};

struct ScanPoint {
    double axis = 0.0;
    double objective = 0.0;
    double r_inner = 0.0;
    std::string flags = "ok";
};

struct ScanResult {
    std::string axis_name;       // "alpha_rad" or "h_m"
    std::string objective_name;  // "P" or "PxY"
    AnnulusScanSpec fixed;
    std::vector<ScanPoint> points;

    // Index of the largest objective among points flagged ok.
    std::size_t argmax() const;
};

// Default alpha grid: 0, `grid - 2` log-spaced interior points over six
// decades below 2 pi / n, and 2 pi / n.
std::vector<double> default_alpha_grid(int n, int grid);
// 0, the points 10^(k / per_decade) within six decades below 2 pi / n, and 2 pi / n.
std::vector<double> decade_alpha_grid(int n, int per_decade);

ScanResult scan_alpha(const AnnulusScanSpec& spec, const std::vector<double>& alphas,
                      const RadialOptions& opt = {}, int workers = 1);
ScanResult scan_alpha(const AnnulusScanSpec& spec, int grid, const RadialOptions& opt = {},
                      int workers = 1);
ScanResult scan_height(const AnnulusScanSpec& spec, const std::vector<double>& heights,
                       const RadialOptions& opt = {}, int workers = 1);

enum class Objective { p, p_times_y, inverse_lambda };

struct SearchRanges {
    std::vector<int> n_values;
    std::vector<double> epsilon_values;
    double alpha_lo_fraction = 1e-4;  // of 2 pi / n
    double alpha_hi_fraction = 1.0;
    double h_lo = 1e-3;
    double h_hi = 1e-3;  // equal bounds fix h
    int coarse_points = 9;
};

struct Constraints {
    double inertia = 9e-6;
    double rho = 1.2e3;
    double delta_rho = 19.3e3;
    double s_th = 1e-30;  // only used by the inverse_lambda objective
};

struct TraceEntry {
    int n = 0;
    double epsilon = 0.0;
    double alpha = 0.0;
    double h = 0.0;
    double r = 0.0;
    double R = 0.0;
    double objective = 0.0;
    std::string stage;
};

struct OptimizationResult {
    TraceEntry best;
    std::vector<TraceEntry> trace;
    bool budget_exhausted = false;
    long evaluations = 0;
};

OptimizationResult optimize_geometry(Objective objective, const SearchRanges& ranges,
                                     const Constraints& constraints, double rc, long budget,
                                     const RadialOptions& opt = {},
                                     const PhysicalConstants& constants = {});

// F(x) = [2 - 3x^2 + e^{-x^2}(x^2 - 2) + sqrt(pi) x^3 erf(x)] / x^4.
double half_cylinder_merit(double ratio);

}  // namespace cslrot
