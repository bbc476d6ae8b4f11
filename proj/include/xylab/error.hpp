#pragma once

#include <stdexcept>
#include <string>

namespace xylab {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration (distribution parameters, geometry, JSON).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Site index or interval outside the chain.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Shape or structure mismatch between objects that must agree.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (non-convergence, insufficient data for a fit).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Spectrum not simple within the degeneracy tolerance.
class DegeneracyError : public NumericError {
public:
    using NumericError::NumericError;
};

/// A correlation matrix whose spectrum left [0,1] beyond tolerance.
class StateCorruptionError : public NumericError {
public:
    using NumericError::NumericError;
};

/// All data points below the representable threshold of a log-space fit.
class UnderflowError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Dense many-body object requested beyond the memory guard.
class SizeGuardError : public Error {
public:
    using Error::Error;
};

}  // namespace xylab
