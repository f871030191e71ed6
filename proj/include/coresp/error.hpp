#pragma once

#include <stdexcept>
#include <string>

namespace coresp {

/// Broad failure category; the CLI maps each one to a distinct exit code.
enum class ErrorKind { parse, validation, numeric, io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Malformed input text: ragged rows, non-numeric cells, missing values.
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorKind::parse, what) {}
};

/// Well-formed input that violates a documented contract.
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// Numerical failure: non-convergence, degenerate statistics.
struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

} // namespace coresp
