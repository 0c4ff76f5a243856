#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace arobust {

/// Malformed configuration text (unknown key, bad literal, missing model key).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model or numerics invariant is violated. `code()` is a short tag such as
/// "eta<=theta" used verbatim in sweep status columns.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string code, const std::string& message)
        : std::invalid_argument(message), code_(std::move(code)) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Root bracketing failure, unbounded bond demand, non-finite integrand.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace arobust
