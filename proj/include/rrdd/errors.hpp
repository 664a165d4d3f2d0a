#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rrdd {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violations: bad sizes, non-finite inputs, invalid parameters.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Raised when a nonlinear solve fails; carries the residual history.
class SolveFailure : public Error {
public:
    SolveFailure(const std::string& what, std::vector<double> residual_history)
        : Error(what), residual_history(std::move(residual_history))
    {
    }

    std::vector<double> residual_history;
};

} // namespace rrdd
