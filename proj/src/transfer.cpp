#include "hwdse/transfer.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "hwdse/error.hpp"
#include "hwdse/text.hpp"

namespace hwdse {

void TransferConfig::validate() const {
    if (!(lambda1_initial >= 0.0) || !(lambda2_initial >= 0.0))
        raise(ErrorCategory::Configuration, "transfer weights must be nonnegative");
    if (!source_model && source_model_path.empty())
        raise(ErrorCategory::Configuration, "transfer needs a source model");
}

std::shared_ptr<const GPModel> TransferConfig::resolve_source() const {
    if (source_model) return source_model;
    return std::make_shared<const GPModel>(load_gp(source_model_path));
}

Posterior combine_posterior(const Posterior& target, const Posterior& source, double lambda1, double lambda2) {
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
        raise(ErrorCategory::Configuration, "combine_posterior: weights must be nonnegative");
    if (target.means.size() != source.means.size())
        raise(ErrorCategory::Configuration, "combine_posterior: posteriors over different query sets");
    Posterior out = target;
    for (std::size_t i = 0; i < out.means.size(); ++i) {
        out.means[i] += lambda1 * source.means[i];
        out.variances[i] += lambda2 * source.variances[i];
    }
    return out;
}

Posterior combine_posterior(const GPModel& target, const GPModel& source, double lambda1, double lambda2,
                            const std::vector<ParameterVector>& queries) {
    if (target.dimension() != source.dimension())
        raise(ErrorCategory::Configuration, "source model dimension " + std::to_string(source.dimension()) +
                                                " differs from target dimension " + std::to_string(target.dimension()));
    return combine_posterior(target.posterior(queries), source.posterior(queries), lambda1, lambda2);
}

double lambda_schedule(int iteration, int total_iterations, double initial) {
    if (total_iterations < 1) raise(ErrorCategory::Argument, "lambda_schedule: total iterations must be >= 1");
    if (iteration < 0 || iteration > total_iterations)
        raise(ErrorCategory::Argument, "lambda_schedule: iteration out of range");
    return initial * (1.0 - static_cast<double>(iteration) / static_cast<double>(total_iterations));
}

Correlation task_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        raise(ErrorCategory::Argument, "task_correlation: series of different lengths");
    const std::size_t n = a.size();
    if (n < 3) raise(ErrorCategory::Argument, "task_correlation: need at least 3 paired values");
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0))
        raise(ErrorCategory::UndefinedCorrelation, "task_correlation: a series has zero variance");
    Correlation c;
    c.rho = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
    const double dof = static_cast<double>(n - 2);
    const double one_minus = 1.0 - c.rho * c.rho;
    if (one_minus <= 0.0) {
        c.pvalue = 0.0;
        return c;
    }
    const double t = std::abs(c.rho) * std::sqrt(dof / one_minus);
    boost::math::students_t dist(dof);
    c.pvalue = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
    return c;
}

}  // namespace hwdse
