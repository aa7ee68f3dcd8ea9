#pragma once

#include <cmath>

namespace cslrot {

// Logarithm of a non-negative quantity; is_zero marks an exact zero.
struct LogValue {
    double log_magnitude = 0.0;
    bool is_zero = false;

    double value() const { return is_zero ? 0.0 : std::exp(log_magnitude); }
    static LogValue zero() { return {0.0, true}; }
};

// ln I_order(x).
LogValue log_bessel_i(int order, double x);

// ln(e^{-x} I_order(x)); never overflows.
LogValue log_scaled_bessel_i(int order, double x);

// e^{-x} I_order(x), in [0, 1].
double scaled_bessel_i(int order, double x);

double erf(double x);

}  // namespace cslrot
