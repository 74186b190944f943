#pragma once

#include <stdexcept>
#include <string>

namespace funcint {

/// Base class for all engine errors. Subcommand runners map the taxonomy to
/// process exit codes (config -> 2, failed numerical check -> 1, rest -> 3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two objects live on different grids or have mismatched lengths.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A numeric argument is outside the operation's domain (e.g. t_b <= t_a).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A grid/run description failed validation before any computation started.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A quadratic form is singular or its real part fails positivity.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Localization rows are rank deficient or produce a bad pushed-forward form.
class LocalizationError : public Error {
public:
    using Error::Error;
};

/// The requested operation is not defined for this integrator kind.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Monte Carlo integrand produced non-finite values.
class SamplingError : public Error {
public:
    using Error::Error;
};

/// Quadrature failed its convergence guard.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// The mean field could not be inverted for the Legendre transform.
class LegendreError : public Error {
public:
    using Error::Error;
};

} // namespace funcint
