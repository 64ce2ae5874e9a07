#include "hwdse/bootstrap.hpp"

#include <cmath>
#include <random>

#include <Eigen/Cholesky>

#include "hwdse/active_learner.hpp"
#include "hwdse/error.hpp"
#include "hwdse/log.hpp"
#include "hwdse/rng.hpp"

namespace hwdse {

NoiseMode parse_noise_mode(const std::string& name) {
    if (name == "mean") return NoiseMode::MeanOnly;
    if (name == "joint") return NoiseMode::JointPosterior;
    raise(ErrorCategory::Configuration, "unknown noise mode '" + name + "' (expected mean or joint)");
}

Dataset SimulatedDataset::to_dataset(const DesignSpace& space, const std::string& objective_name) const {
    Dataset d;
    d.parameter_names = space.parameter_names();
    d.objective_names = {objective_name};
    d.points = points;
    for (double v : values) d.values.push_back({v});
    return d;
}

std::vector<double> sample_gaussian(const Eigen::MatrixXd& covariance, std::uint64_t seed) {
    const auto n = covariance.rows();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);

    Eigen::VectorXd eps;
    // Posterior covariances are often singular (zero variance at training
    // points), which pivoted LDL^T handles without perturbing the matrix.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(covariance);
    if (ldlt.info() == Eigen::Success) {
        const Eigen::VectorXd d = ldlt.vectorD();
        if (d.allFinite() && d.minCoeff() >= -1e-8 * std::max(1.0, d.cwiseAbs().maxCoeff())) {
            Eigen::VectorXd w = d.cwiseMax(0.0).cwiseSqrt().cwiseProduct(z);
            w = ldlt.matrixL() * w;
            eps = ldlt.transpositionsP().transpose() * w;
        }
    }
    if (eps.size() == 0) {
        const double base = n > 0 ? std::max(covariance.trace() / static_cast<double>(n), 1e-300) : 1.0;
        for (double jitter = 1e-8 * base; jitter <= 1e-2 * base * (1.0 + 1e-12); jitter *= 10.0) {
            Eigen::MatrixXd A = covariance;
            A.diagonal().array() += jitter;
            Eigen::LLT<Eigen::MatrixXd> llt(A);
            if (llt.info() != Eigen::Success) continue;
            logger()->warn("posterior covariance needed jitter {:g} to factorize", jitter);
            eps = llt.matrixL() * z;
            break;
        }
    }
    if (eps.size() != n || !eps.allFinite())
        raise(ErrorCategory::Numerical, "posterior covariance factorization failed after jitter escalation");
    return {eps.data(), eps.data() + eps.size()};
}

SimulatedDataset bootstrap_sample(const GPModel& gp, const DesignSpace& space, const BootstrapConfig& cfg) {
    if (space.dimension() != gp.dimension())
        raise(ErrorCategory::Configuration, "bootstrap: model dimension " + std::to_string(gp.dimension()) +
                                                " differs from design space dimension " +
                                                std::to_string(space.dimension()));
    SimulatedDataset out;
    if (cfg.query_source == QuerySource::ProvidedList) {
        if (cfg.queries.empty()) raise(ErrorCategory::Configuration, "bootstrap: empty query list");
        out.points = cfg.queries;
    } else {
        if (cfg.n_points < 1) raise(ErrorCategory::Configuration, "bootstrap: n_points must be >= 1");
        const auto n = static_cast<std::uint64_t>(cfg.n_points);
        const std::uint64_t query_seed = derive_seed(cfg.seed, 0);
        if (space.cardinality() >= n) {
            out.points = SearchDomain(space).sample_unvisited(static_cast<std::size_t>(n), {}, query_seed);
        } else {
            std::mt19937_64 rng(query_seed);
            std::uniform_int_distribution<std::uint64_t> pick(0, space.cardinality() - 1);
            for (std::uint64_t i = 0; i < n; ++i) out.points.push_back(space.point_at(pick(rng)));
        }
    }

    if (cfg.noise_mode == NoiseMode::MeanOnly) {
        out.values = gp.posterior(out.points).means;
        return out;
    }
    const auto joint = gp.posterior_joint(out.points);
    const auto eps = sample_gaussian(joint.covariance, derive_seed(cfg.seed, 1));
    out.values.resize(out.points.size());
    for (std::size_t i = 0; i < out.points.size(); ++i) out.values[i] = joint.means[i] + eps[i];
    return out;
}

}  // namespace hwdse
