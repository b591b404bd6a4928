#ifndef CRNLYAP_ERROR_HPP
#define CRNLYAP_ERROR_HPP

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace crnlyap {

/// Compact %.6g rendering for messages.
inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape mismatch or a network lacking the structure an operation needs
/// (wrong dimension of the stoichiometric subspace, no pattern match, ...).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain (nonpositive concentration, rate, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Numerical evaluation failed: non-finite gradient, quadrature or root
/// finder did not converge.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// A constructor could not produce a Lyapunov function for the network.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// No positive equilibrium was located in the requested class.
class NoEquilibriumError : public ConstructionError {
public:
    using ConstructionError::ConstructionError;
};

/// The network lies outside every supported construction class.
class UnsupportedNetworkError : public ConstructionError {
public:
    using ConstructionError::ConstructionError;
};

class SimulationError : public Error {
public:
    SimulationError(const std::string& what, double time_reached)
        : Error(what), time_reached_(time_reached) {}

    double time_reached() const noexcept { return time_reached_; }

private:
    double time_reached_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          message_(message),
          line_(line),
          column_(column) {}

    const std::string& message() const noexcept { return message_; }
    /// 1-based line of the offending token.
    std::size_t line() const noexcept { return line_; }
    /// 1-based column of the first character of the offending token.
    std::size_t column() const noexcept { return column_; }

private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

}  // namespace crnlyap

#endif  // CRNLYAP_ERROR_HPP
