#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hwdse/gp.hpp"

namespace hwdse {

/// Inductive transfer from a persisted source surrogate into candidate scoring.
struct TransferConfig {
    std::filesystem::path source_model_path;
    /// Overrides `source_model_path` when set.
    std::shared_ptr<const GPModel> source_model;
    double lambda1_initial = 0.5;
    double lambda2_initial = 0.0;
    /// Target objective receiving the source information; empty means the first.
    std::string objective;

    void validate() const;
    /// The in-memory source model, or the one loaded from the path.
    std::shared_ptr<const GPModel> resolve_source() const;
};

/// Blended posterior on the target's original scale:
///   mean = mu_target + lambda1 * mu_source
///   var  = var_target + lambda2 * var_source
/// Both surrogates are de-standardized with their own constants before blending.
Posterior combine_posterior(const GPModel& target, const GPModel& source, double lambda1, double lambda2,
                            const std::vector<ParameterVector>& queries);

/// Same blend given already computed posteriors at the same queries.
Posterior combine_posterior(const Posterior& target, const Posterior& source, double lambda1, double lambda2);

/// Linear decay to zero: initial * (1 - iteration / total).
double lambda_schedule(int iteration, int total_iterations, double initial);

struct Correlation {
    double rho = 0.0;
    double pvalue = 1.0;
};

/// Pearson correlation with a two-sided Student-t p-value on n - 2 degrees of
/// freedom. Needs n >= 3 and nonzero variance in both series.
Correlation task_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace hwdse
