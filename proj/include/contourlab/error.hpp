#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace contourlab {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

class UnsupportedInput : public Error {
    using Error::Error;
};

class DimensionError : public Error {
    using Error::Error;
};

class MissingMetadata : public Error {
    using Error::Error;
};

class FitError : public Error {
    using Error::Error;
};

class InputError : public Error {
    using Error::Error;
};

class ConfigError : public Error {
    using Error::Error;
};

}  // namespace contourlab
