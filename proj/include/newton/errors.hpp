#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace newton {

// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Problem definition / evaluation.
class KindError : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class EvaluationError : public Error { using Error::Error; };
class NonFiniteValue : public EvaluationError { using EvaluationError::EvaluationError; };

// Linear algebra.
class SingularMatrix : public Error { using Error::Error; };
class NotPositiveDefinite : public Error { using Error::Error; };
class NotSymmetric : public Error { using Error::Error; };
class IndefiniteOperator : public Error { using Error::Error; };

// Line search.
class NotDescentDirection : public Error { using Error::Error; };
class LineSearchFailed : public Error { using Error::Error; };
class DegenerateInterpolant : public Error { using Error::Error; };

// Trust region.
class ZeroGradient : public Error { using Error::Error; };
class BadNewtonStep : public Error { using Error::Error; };

// Solver loop.
class NumericalBreakdown : public Error { using Error::Error; };

// Registry and configuration.
class UnknownComponent : public Error {
public:
    UnknownComponent(std::string name, std::string category)
        : Error("unknown " + category + " component '" + name + "'"),
          name_(std::move(name)), category_(std::move(category)) {}
    const std::string& name() const noexcept { return name_; }
    const std::string& category() const noexcept { return category_; }

private:
    std::string name_;
    std::string category_;
};

class InvalidOverride : public Error {
public:
    InvalidOverride(std::string key, const std::string& reason)
        : Error("invalid override '" + key + "': " + reason), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class UnknownSolver : public UnknownComponent {
public:
    explicit UnknownSolver(std::string name)
        : UnknownComponent(std::move(name), "linear-solvers") {}
};

class UnknownStrategy : public UnknownComponent {
public:
    UnknownStrategy(std::string name, std::string category)
        : UnknownComponent(std::move(name), std::move(category)) {}
};

class RegistryFrozen : public Error { using Error::Error; };

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Design metrics.
class EmptyPackage : public Error { using Error::Error; };
class IsolatedPackage : public Error { using Error::Error; };
class UndeclaredClass : public Error { using Error::Error; };
class UnknownPackage : public Error { using Error::Error; };

}  // namespace newton
