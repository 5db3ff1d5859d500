#pragma once

#include <stdexcept>
#include <string>

namespace gfe {

// Domain errors map to CLI exit status 1, configuration errors to 2.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FactorBudgetExceeded : DomainError {
    explicit FactorBudgetExceeded(const std::string& what)
        : DomainError("factorization budget exceeded: " + what) {}
};

struct PrecisionExhausted : DomainError {
    explicit PrecisionExhausted(const std::string& what)
        : DomainError("precision exhausted: " + what) {}
};

// Thrown by interval code when a comparison cannot be decided at the
// current precision. Callers retry at higher precision.
struct Indeterminate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gfe
