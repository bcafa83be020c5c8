#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spmld {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input text; carries the 1-based line number when known.
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t line_no = 0)
        : Error(line_no ? "line " + std::to_string(line_no) + ": " + what : what),
          line(line_no) {}
    std::size_t line;
};

struct RangeError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct InvariantError : Error {
    using Error::Error;
};

struct UnsupportedFormatError : Error {
    using Error::Error;
};

struct UndefinedMetricError : Error {
    using Error::Error;
};

}  // namespace spmld
