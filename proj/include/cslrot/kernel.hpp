#pragma once

#include "cslrot/geometry.hpp"

namespace cslrot {

// Kernel values are carried with the angular exponential factored out:
// A(r, r') = scaled_value * exp(exponent), exponent = r r' / (2 rc^2).
struct KernelEval {
    double scaled_value = 0.0;
    double exponent = 0.0;
    long terms_used = 0;
    double truncation_error_estimate = 0.0;

    // Raw A; overflows for large exponents, use only for small ones.
    double value() const;
    // exp(-(r^2 + r'^2)/(4 rc^2)) * A, i.e. scaled_value * exp(-(r - r')^2/(4 rc^2)).
    double weighted(double r, double r_prime, double rc) const;
};

struct SeriesOptions {
    double tol = 1e-12;
    long max_terms = 1000000;
};

KernelEval kernel_series_annulus(const PeriodicAnnulus& model, double r, double r_prime, double rc,
                                 double tol);
KernelEval kernel_series_two_annuli(const TwoAnnuli& model, double r, double r_prime, double rc,
                                    double tol);

// Best analytic evaluation for any model: Bessel series for moderate
// arguments, the exact angular image sum once the series gets long.
KernelEval kernel_analytic(const MassModel& model, double r, double r_prime, double rc,
                           double tol = 1e-12);
KernelEval kernel_image_sum(const MassModel& model, double r, double r_prime, double rc);

// Density entering the quadrature: the full one, or its deviation from the
// angular mean at each radius. Both give the same kernel; the second avoids
// cancelling the large homogeneous contribution.
enum class QuadratureDensity { full, fluctuation };

// Direct quadrature of the defining double integral over both angles, taken in
// the difference angle: the integral over the mean angle is piecewise linear and
// exact, the remaining one is adaptive Gauss-Kronrod split at every kink.
KernelEval kernel_quadrature(const MassModel& model, double r, double r_prime, double rc,
                             double abs_tol, double rel_tol,
                             QuadratureDensity part = QuadratureDensity::fluctuation);

enum class ExtendedPrecision { quad, digits50 };

// The same quadrature of the fluctuation kernel in 113-bit or 50-digit
// arithmetic. Resolves kernels far below the double-precision cancellation
// floor; used as the reference oracle.
KernelEval kernel_quadrature_extended(const MassModel& model, double r, double r_prime, double rc,
                                      double abs_tol, double rel_tol,
                                      ExtendedPrecision precision = ExtendedPrecision::quad);

// Upper bound on |scaled A|, a natural scale for absolute tolerances.
double kernel_magnitude_bound(const MassModel& model, double r, double r_prime, double rc);

KernelEval half_cylinder_kernel(double r, double r_prime, double radius, double rc,
                                double delta_rho);

bool mixed_term_vanishes(int n, int m);

// Ring-pair sums S with scaled A = 4 rc^4 drho^2 S / (r r').
namespace detail {
double pair_series(const AngularRing& a, const AngularRing& b, double x, const SeriesOptions& opt,
                   long& terms, double& rel_err);
double pair_images(const AngularRing& a, const AngularRing& b, double x);
long pair_series_cost(const AngularRing& a, const AngularRing& b, double x);
}  // namespace detail

}  // namespace cslrot
