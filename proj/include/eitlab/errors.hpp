#pragma once

#include <stdexcept>
#include <string>

namespace eit {

/// Root of every exception thrown by eitlab.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input and configuration problems (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The weak-signal precondition of a linear-response operation failed.
class ValidityError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Argument outside the validity window of a correlation or formula.
class RangeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Problems with measured or generated data (CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

class NoDip : public DataError {
public:
    using DataError::DataError;
};

class Ambiguous : public DataError {
public:
    using DataError::DataError;
};

class DegenerateData : public DataError {
public:
    using DataError::DataError;
};

// Numerical failures (CLI exit code 4).
class NumericalError : public Error {
public:
    using Error::Error;
};

class PoleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularLiouvillian : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RankDeficient : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace eit
