#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coaxfilt {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: violated type invariants, malformed files, missing fields.
class InputError : public Error {
public:
    using Error::Error;
};

/// Frequency requested outside the tabulated material range.
class OutOfRangeError : public InputError {
public:
    using InputError::InputError;
};

/// Touchstone / CSV parse failure. Carries the 1-based line number.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Numerical breakdown inside a model evaluation.
class NumericError : public Error {
public:
    using Error::Error;
};

class SingularNetworkError : public NumericError {
public:
    using NumericError::NumericError;
};

// Inversion failures. These are reported per point by extract_material.
class NonPassiveDataError : public NumericError {
public:
    using NumericError::NumericError;
};

class SingularInversionError : public NumericError {
public:
    using NumericError::NumericError;
};

class BranchAmbiguityError : public NumericError {
public:
    BranchAmbiguityError(std::size_t interval_start, const std::string& what)
        : NumericError(what), interval_start_(interval_start) {}

    /// Index i of the offending interval [i, i+1].
    std::size_t interval_start() const noexcept { return interval_start_; }

private:
    std::size_t interval_start_;
};

class UnphysicalPointError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Synthesis request the closed-form solvers cannot satisfy.
class UnsupportedMaterialError : public Error {
public:
    using Error::Error;
};

class NoSolutionError : public UnsupportedMaterialError {
public:
    using UnsupportedMaterialError::UnsupportedMaterialError;
};

class InsufficientDataError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace coaxfilt
