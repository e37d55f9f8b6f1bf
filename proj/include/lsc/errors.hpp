#pragma once

#include <stdexcept>
#include <string>

namespace lsc {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model or cost parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain where a quantity is defined (e.g. beyond a pole of phi).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A bracketing search or iteration did not converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Two roots coincide; confluent partial fractions are not supported.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// An expectation does not exist (exponential rate too large for the law).
class IntegrabilityError : public Error {
public:
    using Error::Error;
};

/// The averaging function has no sign change on the search window.
class NoRootError : public Error {
public:
    using Error::Error;
};

/// The averaging function fails the sign/monotonicity structure around its root.
class Assumption4Violation : public Error {
public:
    using Error::Error;
};

/// Simulation configuration rejected (e.g. truncation remainder too large).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A scenario or output file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace lsc
