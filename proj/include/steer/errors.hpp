#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace steer {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// |b(t)| or omega01 fell to the gap floor; the adiabatic basis is undefined.
class GapCollapse : public Error {
public:
    using Error::Error;
};

// Field points along -z, where the closed-form eigenvector chart is singular.
class GaugeSingularity : public Error {
public:
    using Error::Error;
};

class StepTooCoarse : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

// A linear-order (first superadiabatic) map was requested with alpha >= 1.
class AdiabaticityViolation : public Error {
public:
    using Error::Error;
};

class LoopNotClosed : public Error {
public:
    using Error::Error;
};

class NonUniformGridUnsupported : public Error {
public:
    using Error::Error;
};

class StepRejectionLimit : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Carries every problem found, not just the first one.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : Error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out = "validation failed";
        for (const auto& issue : issues) {
            out += "\n  - ";
            out += issue;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

} // namespace steer
