#pragma once

#include <stdexcept>
#include <string>

namespace rhlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed operator text. Carries the 1-based position of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Argument outside the domain of a mathematical operation (e.g. evaluating at z = 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Failure inside the analysis pipeline (recursion depth, ill-posed matching, inconsistent numerics).
class PipelineError : public Error {
public:
    using Error::Error;
};

/// JSON input that does not have the expected shape.
class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace rhlab
