#pragma once

#include <stdexcept>

namespace spx {

// Base class for all spxtrack errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file, config key, or scenario content.
struct ParseError : Error {
    using Error::Error;
};

// Ill-conditioned or rank-deficient geometry (calibration, triangulation,
// projection at infinity).
struct DegenerateError : Error {
    using Error::Error;
};

// Inputs that do not line up: mismatched sequence lengths, trajectory/truth
// coverage gaps.
struct CoverageError : Error {
    using Error::Error;
};

// A required input is absent (clicks rows, sequence files).
struct MissingInputError : Error {
    using Error::Error;
};

} // namespace spx
