#pragma once

#include <stdexcept>
#include <string>

namespace cfa {

// Base class for every error the toolkit raises deliberately.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An exponent outside [1, inf].
struct InvalidExponentError : Error {
    using Error::Error;
};

// Operands that live in different spaces (domains, grids, exponents).
struct SpaceMismatchError : Error {
    using Error::Error;
};

// A selector was asked to choose from nothing.
struct EmptySelectionError : Error {
    using Error::Error;
};

// A runtime-checked bound or certificate row failed.
struct CertificateError : Error {
    using Error::Error;
};

// A quotient class with no nonconstant representative where one is required.
struct DegenerateClassError : Error {
    using Error::Error;
};

// A caller-supplied oracle broke its contract.
struct OracleViolationError : Error {
    using Error::Error;
};

// Grid spacing too coarse for the requested kernel.
struct ResolutionError : Error {
    using Error::Error;
};

// The dense-point list cannot cover the target set at the needed radius.
struct InsufficientDensityError : Error {
    using Error::Error;
};

// Malformed or out-of-contract input values.
struct InvalidInputError : Error {
    using Error::Error;
};

// Unreadable or syntactically invalid file content.
struct ParseError : Error {
    using Error::Error;
};

// Filesystem failure (missing file, unwritable output).
struct IoError : Error {
    using Error::Error;
};

} // namespace cfa
