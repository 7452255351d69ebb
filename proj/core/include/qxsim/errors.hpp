#pragma once

#include <stdexcept>
#include <string>

namespace qxsim {

/// Base class for all qxsim errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Netlist / Touchstone syntax errors, carrying source position.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column = 0)
        : Error(format(what, line, column)), raw_(what), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& raw_message() const { return raw_; }

private:
    static std::string format(const std::string& what, int line, int column) {
        if (line <= 0) return what;
        std::string s = "parse error at line " + std::to_string(line);
        if (column > 0) s += ", column " + std::to_string(column);
        return s + ": " + what;
    }
    std::string raw_;
    int line_ = 0;
    int column_ = 0;
};

/// Circuit invariant violations (dangling nodes, bad values, duplicate ports).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Linear system could not be factorized or solved to working precision.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Frequency outside a Touchstone element's tabulated band.
class BandError : public Error {
public:
    using Error::Error;
};

/// File I/O failures.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace qxsim
