#pragma once

#include <cstdint>
#include <vector>

#include "hwdse/design_space.hpp"
#include "hwdse/evaluator.hpp"
#include "hwdse/gp.hpp"

namespace hwdse {

enum class NoiseMode {
    MeanOnly,        // simulated value = posterior mean
    JointPosterior,  // posterior mean plus one joint draw of the posterior error process
};

enum class QuerySource { UniformFromSpace, ProvidedList };

struct BootstrapConfig {
    int n_points = 2000;
    NoiseMode noise_mode = NoiseMode::JointPosterior;
    std::uint64_t seed = 0;
    QuerySource query_source = QuerySource::UniformFromSpace;
    /// Used when query_source is ProvidedList; n_points is then ignored.
    std::vector<ParameterVector> queries;
};

NoiseMode parse_noise_mode(const std::string& name);

struct SimulatedDataset {
    std::vector<ParameterVector> points;
    std::vector<double> values;

    /// In the dataset CSV schema, with a single objective column.
    Dataset to_dataset(const DesignSpace& space, const std::string& objective_name) const;
};

/// Draws `n` correlated normal vectors' worth of noise: L z with L a
/// factor of `covariance` (pivoted LDL^T; escalating diagonal jitter if that
/// fails). Throws Numerical when no factor can be found.
std::vector<double> sample_gaussian(const Eigen::MatrixXd& covariance, std::uint64_t seed);

/// Mints a simulated dataset from a fitted surrogate. Query locations are
/// distinct uniform draws from the space (with replacement only when the space
/// is smaller than n_points), or the provided list.
SimulatedDataset bootstrap_sample(const GPModel& gp, const DesignSpace& space, const BootstrapConfig& cfg);

}  // namespace hwdse
