#pragma once

#include <stdexcept>
#include <string>

namespace moteval {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input files (bad JSON, bad PGM header, truncated binary).
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input violating a data invariant (ragged T, bad flag).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Shape / dimension mismatches between otherwise valid objects.
class SizeError : public Error {
public:
    using Error::Error;
};

// Out-of-domain scalar arguments (k > N, t out of range, k < 1).
class ParamError : public Error {
public:
    using Error::Error;
};

// Numeric preconditions (zero-norm vectors, non-finite features).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace moteval
