#pragma once

#include <stdexcept>
#include <string>

namespace hcav {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto its exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class InputDomainError : public Error {
public:
    using Error::Error;
};

/// Resonator geometry that is marginal or unstable where a stable one is needed.
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

/// Spectrum or record analysis that cannot produce a meaningful answer.
class AnalysisError : public Error {
public:
    using Error::Error;
};

/// Simulation domain construction failure.
class BuildError : public Error {
public:
    using Error::Error;
};

/// Least-squares surface fit failure; carries the radius that was found.
class FitError : public Error {
public:
    FitError(const std::string& what, double radius_um)
        : Error(what), radius_um_(radius_um) {}
    double radius_um() const noexcept { return radius_um_; }

private:
    double radius_um_;
};

/// Optimizer could not reach an acceptable merit value.
class OptimizationError : public Error {
public:
    OptimizationError(const std::string& what, double best_scale, double best_merit)
        : Error(what), best_scale_(best_scale), best_merit_(best_merit) {}
    double best_scale() const noexcept { return best_scale_; }
    double best_merit() const noexcept { return best_merit_; }

private:
    double best_scale_;
    double best_merit_;
};

/// Malformed input file or configuration.
class FormatError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace hcav
