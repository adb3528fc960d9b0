#pragma once

#include <stdexcept>
#include <string>

namespace cmmb {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition. The CLI maps it to exit code 2.
class DomainError : public Error {
public:
    using Error::Error;
};

// Request exceeds a documented size cap (joint-law expansion, LP size, ...).
class CapacityError : public DomainError {
public:
    using DomainError::DomainError;
};

// Floating-point or solver failure. The CLI maps it to exit code 3.
class NumericError : public Error {
public:
    using Error::Error;
};

// Root finder gave up; carries the last bracket it held.
class SolverError : public NumericError {
public:
    SolverError(const std::string& what, double lo, double hi)
        : NumericError(what), lo_(lo), hi_(hi) {}

    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

}  // namespace cmmb
