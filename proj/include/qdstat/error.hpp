#pragma once

#include <stdexcept>
#include <string>

namespace qdstat {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a model (negative rate, impurity >= 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Curves or grids that cannot be combined: mismatched axes, step too coarse
/// for the requested convolution, non-uniform samples.
class GridError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure did not reach its target (steady state, division by zero, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace qdstat
