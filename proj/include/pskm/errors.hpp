#pragma once

#include <stdexcept>
#include <string>

namespace pskm {

// Base class for every library error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a precondition.
struct InvalidArgument : Error {
    using Error::Error;
};

// An evaluation point lies outside the basis domain.
struct PointOutsideDomain : Error {
    using Error::Error;
};

// Too few observed points to determine a fit at the requested penalty order.
struct InsufficientData : Error {
    using Error::Error;
};

// The linear system of a fit is (numerically) singular.
struct SingularSystem : Error {
    using Error::Error;
};

// The roughness term vanishes, so its logarithm is undefined and the
// smoothing-parameter search cannot discriminate between grid points.
struct DegenerateRoughness : Error {
    using Error::Error;
};

// A correlation was requested against a constant vector.
struct ZeroVariance : Error {
    using Error::Error;
};

// A file could not be opened, read, or written.
struct IoError : Error {
    using Error::Error;
};

// Malformed text input; row and col are 1-based file coordinates.
struct ParseError : Error {
    int row;
    int col;
    ParseError(const std::string& what, int row_, int col_)
        : Error(what + " (row " + std::to_string(row_) + ", col " + std::to_string(col_) + ")"),
          row(row_),
          col(col_) {}
};

}  // namespace pskm
