#pragma once

#include <stdexcept>
#include <string>

namespace cslrot {

// Raised when a mass model or solver input breaks a geometric invariant.
class InvalidGeometry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A series or quadrature that could not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, long terms_used, double achieved)
        : std::runtime_error(what), terms_used_(terms_used), achieved_(achieved) {}

    long terms_used() const noexcept { return terms_used_; }
    double achieved_error() const noexcept { return achieved_; }

private:
    long terms_used_;
    double achieved_;
};

// Bad or inconsistent user input (config files, overlay data, CLI values).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cslrot
