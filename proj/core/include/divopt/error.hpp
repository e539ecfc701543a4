#pragma once

#include <stdexcept>
#include <string>

namespace divopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid model parameters or run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operation not defined for the regime the parameters fall into.
class UnsupportedRegime : public Error {
public:
    using Error::Error;
};

/// The transformed ODE right-hand side was evaluated on the lower envelope.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A dividend was requested at a state inside the no-dividend region.
class NoActionError : public Error {
public:
    using Error::Error;
};

/// The frontier integration broke down before locating the crossing.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double last_q, double envelope_gap)
        : Error(what), last_q_(last_q), envelope_gap_(envelope_gap) {}

    [[nodiscard]] double last_q() const noexcept { return last_q_; }
    /// n - ell at the last accepted point.
    [[nodiscard]] double envelope_gap() const noexcept { return envelope_gap_; }

private:
    double last_q_;
    double envelope_gap_;
};

}  // namespace divopt
