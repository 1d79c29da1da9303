#pragma once

#include <stdexcept>
#include <string>

namespace p2c {

/// Base class for all pit2crack errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input value violates a documented bound or invariant.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed text input (CSV, JSON config); message carries the location.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Geometry does not fit the requested grid / slab dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Stochastic generation cannot proceed (e.g. sub-pit level on a flat field).
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Non-orthonormal plane frame or similar geometric precondition failure.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// An iterative solver failed to converge; message reports the residual.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace p2c
