#pragma once

#include <optional>

#include "cslrot/geometry.hpp"
#include "cslrot/kernel.hpp"

namespace cslrot {

struct CslParams {
    double lambda = 1.0;
    double rc = 1e-7;
    std::optional<double> omega_c;

    bool operator==(const CslParams&) const = default;
};

struct NoiseBudget {
    double temperature = 300.0;
    double gamma = 1.0;
    double inertia = 1.0;
    double omega0 = 1.0;
    std::optional<double> s_th_override;

    bool operator==(const NoiseBudget&) const = default;
};

enum class KernelMethod { series, quadrature };

struct RadialOptions {
    KernelMethod method = KernelMethod::series;
    double rel_tol = 1e-6;
    double abs_floor = 1e-40;
    double band_halfwidth = 12.0;  // in units of rc
    double kernel_tol = 1e-10;     // relative tolerance of each kernel evaluation
    int max_intervals = 4000;
    QuadratureDensity quadrature_density = QuadratureDensity::fluctuation;
};

struct RadialResult {
    double value = 0.0;
    double abs_error = 0.0;
    double magnitude_scale = 0.0;  // integral of the kernel magnitude bound
    long kernel_evaluations = 0;
    long max_series_terms = 0;
};

struct SpectrumResult {
    double p_factor = 0.0;
    double y_factor = 0.0;
    double s_csl = 0.0;
    double eta = 0.0;
    double p_abs_error = 0.0;
    long kernel_evaluations = 0;
    long max_series_terms = 0;
};

double axial_factor_y(double h, double rc);

RadialResult radial_factor_p(const MassModel& model, double rc, const RadialOptions& opt = {});

// Absolute tolerance implied by opt for this model and rc.
double radial_abs_tolerance(const MassModel& model, double rc, const RadialOptions& opt);

// Torque DNS prefactor lambda hbar^2 / (4 m0^2 rc^4).
double csl_prefactor(double lambda, double rc, const PhysicalConstants& k);

SpectrumResult csl_torque_dns(const MassModel& model, const CslParams& csl,
                              const PhysicalConstants& constants = {}, const RadialOptions& opt = {});

double thermal_torque_dns(const NoiseBudget& budget, const PhysicalConstants& constants = {});

double colored_multiplier(double omega, double omega_c);

double angular_psd(double omega, const NoiseBudget& budget, double s_torque_total);

void validate(const NoiseBudget& budget);

}  // namespace cslrot
