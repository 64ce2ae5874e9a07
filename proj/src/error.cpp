#include "hwdse/error.hpp"

namespace hwdse {

std::string_view category_name(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::Argument: return "argument";
        case ErrorCategory::Configuration: return "configuration";
        case ErrorCategory::Manifest: return "manifest";
        case ErrorCategory::Format: return "format";
        case ErrorCategory::Ingestion: return "ingestion";
        case ErrorCategory::Data: return "data";
        case ErrorCategory::NotCovered: return "not_covered";
        case ErrorCategory::Numerical: return "numerical";
        case ErrorCategory::Convergence: return "convergence";
        case ErrorCategory::SingularFit: return "singular_fit";
        case ErrorCategory::UndefinedCorrelation: return "undefined_correlation";
        case ErrorCategory::UndefinedNormalization: return "undefined_normalization";
    }
    return "unknown";
}

int exit_code(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::Argument:
        case ErrorCategory::Configuration:
        case ErrorCategory::Manifest:
            return 2;
        case ErrorCategory::Format:
        case ErrorCategory::Ingestion:
        case ErrorCategory::Data:
        case ErrorCategory::SingularFit:
        case ErrorCategory::UndefinedCorrelation:
        case ErrorCategory::UndefinedNormalization:
            return 3;
        case ErrorCategory::Numerical:
        case ErrorCategory::Convergence:
            return 4;
        case ErrorCategory::NotCovered:
            return 5;
    }
    return 1;
}

}  // namespace hwdse
