#pragma once

#include <stdexcept>
#include <string>

namespace convbound {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape or size disagreement between operands.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Argument outside its documented domain (tolerances, probabilities, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Matrix expected to be square.
class NotSquare : public Error {
public:
    using Error::Error;
};

// Matrix expected to be symmetric within tolerance.
class NotSymmetric : public Error {
public:
    using Error::Error;
};

// Dense eigen-oracle invoked above its configured size cap.
class OracleTooLarge : public Error {
public:
    using Error::Error;
};

// Sliding-window plan requested with a filter longer than the input.
class FilterLargerThanInput : public Error {
public:
    using Error::Error;
};

// Toeplitz generating sequence requested for a non-overlapping stride.
class NotOverlapping : public Error {
public:
    using Error::Error;
};

// A bound formula that divides by a spectral norm received s = 0.
class ZeroSpectralNorm : public Error {
public:
    using Error::Error;
};

// Malformed bundle manifest.
class ParseError : public Error {
public:
    using Error::Error;
};

// Weight payload shape disagrees with the manifest or the layer.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

// Weight payload contains NaN or Inf.
class NonFiniteWeight : public Error {
public:
    using Error::Error;
};

// Filesystem failure while reading or writing a bundle.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace convbound
