#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hwdse {

enum class ErrorCategory {
    Argument,       // malformed call: dimension mismatch, bad lengths
    Configuration,  // invalid kernel/run/transfer configuration, missing inputs
    Manifest,       // design-space manifest problems
    Format,         // malformed model file
    Ingestion,      // dataset CSV problems
    Data,           // non-finite or degenerate data
    NotCovered,     // table evaluator asked for a point it does not hold
    Numerical,      // factorization failed after jitter escalation
    Convergence,    // iterative solver ran out of sweeps
    SingularFit,    // rank-deficient regression design
    UndefinedCorrelation,
    UndefinedNormalization,
};

/// Single exception type for the library; the category drives CLI exit codes.
class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

  private:
    ErrorCategory category_;
};

std::string_view category_name(ErrorCategory category) noexcept;

/// Process exit code for an error category.
///   2 configuration (argument, configuration, manifest)
///   3 data (format, ingestion, data, singular fit, undefined statistics)
///   4 numerical (factorization, convergence)
///   5 not covered
int exit_code(ErrorCategory category) noexcept;

[[noreturn]] inline void raise(ErrorCategory category, const std::string& message) {
    throw Error(category, message);
}

}  // namespace hwdse
