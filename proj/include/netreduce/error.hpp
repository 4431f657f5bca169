#pragma once

#include <stdexcept>
#include <string>

namespace netreduce {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Short machine-readable category used by the CLI error record.
    virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_argument"; }
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }
    const char* kind() const noexcept override { return "convergence"; }

private:
    double residual_;
};

class SingularSystem : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "singular_system"; }
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, long step) : Error(what), step_(step) {}
    long step() const noexcept { return step_; }
    const char* kind() const noexcept override { return "divergence"; }

private:
    long step_;
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

}  // namespace netreduce
