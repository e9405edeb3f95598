#pragma once

#include <stdexcept>
#include <string>

namespace relwave {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition or malformed input (CLI exit code 2).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A numerical guard tripped: CFL, overflow, series domain (CLI exit code 3).
class NumericalGuard : public Error {
public:
    using Error::Error;
};

class CflViolation : public NumericalGuard {
public:
    using NumericalGuard::NumericalGuard;
};

}  // namespace relwave
