#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hwdse/design_space.hpp"
#include "hwdse/kernel.hpp"

namespace hwdse {

/// Default observation noise, on the standardized output scale.
inline constexpr double kDefaultNoiseVariance = 1e-6;

struct Posterior {
    std::vector<double> means;
    std::vector<double> variances;
};

struct JointPosterior {
    std::vector<double> means;
    Eigen::MatrixXd covariance;
};

/// Fitted Gaussian process surrogate for one objective.
///
/// Inputs are min-max normalized with `bounds()` before any kernel evaluation.
/// Outputs are z-scored; `posterior` reports on the original scale. The model
/// is immutable once built and safe for concurrent reads.
class GPModel {
  public:
    /// Raw training points (after merging duplicates).
    const std::vector<ParameterVector>& inputs() const { return inputs_; }
    /// Training observations on the original scale.
    const std::vector<double>& targets() const { return targets_; }

    const KernelSpec& kernel() const { return kernel_; }
    double noise_variance() const { return noise_variance_; }
    /// Diagonal jitter that was needed to factorize the training covariance.
    double jitter() const { return jitter_; }
    const InputBounds& bounds() const { return bounds_; }
    double y_mean() const { return y_mean_; }
    double y_std() const { return y_std_; }
    Direction direction() const { return direction_; }
    const std::string& name() const { return name_; }
    std::size_t dimension() const { return bounds_.dimension(); }
    std::size_t size() const { return inputs_.size(); }

    /// Lower-triangular L with L L^T = K + (noise + jitter) I.
    const Eigen::MatrixXd& cholesky() const { return chol_; }
    /// (K + (noise + jitter) I)^{-1} y on the standardized scale.
    const Eigen::VectorXd& alpha() const { return alpha_; }

    /// Marginal posterior mean and (clamped, nonnegative) variance of the latent
    /// function at each raw query point.
    Posterior posterior(const std::vector<ParameterVector>& queries) const;

    /// Full posterior covariance over the query set, symmetrized.
    JointPosterior posterior_joint(const std::vector<ParameterVector>& queries) const;

  private:
    friend GPModel fit_gp(const std::vector<ParameterVector>&, const std::vector<double>&, const KernelSpec&, double,
                          Direction, const InputBounds&, std::string);
    friend GPModel load_gp(const std::filesystem::path&);

    void factorize(std::optional<double> fixed_jitter);
    Eigen::MatrixXd normalized(const std::vector<ParameterVector>& points) const;

    std::vector<ParameterVector> inputs_;
    std::vector<double> targets_;
    KernelSpec kernel_;
    double noise_variance_ = kDefaultNoiseVariance;
    double jitter_ = 0.0;
    InputBounds bounds_;
    double y_mean_ = 0.0;
    double y_std_ = 1.0;
    Direction direction_ = Direction::Maximize;
    std::string name_;

    Eigen::MatrixXd x_norm_;
    Eigen::VectorXd y_std_vec_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd alpha_;
};

/// Fits a GP. Duplicate input rows are merged by averaging their observations.
/// Throws Data for non-finite values, Argument for size mismatches and
/// Numerical when the covariance cannot be factorized even with 1e-2 jitter.
GPModel fit_gp(const std::vector<ParameterVector>& X, const std::vector<double>& y, const KernelSpec& kernel,
               double noise_variance, Direction direction, const InputBounds& bounds, std::string name = {});

/// As above, normalizing with the bounding box of X.
GPModel fit_gp(const std::vector<ParameterVector>& X, const std::vector<double>& y, const KernelSpec& kernel,
               double noise_variance = kDefaultNoiseVariance, Direction direction = Direction::Maximize);

void save_gp(const GPModel& model, const std::filesystem::path& path);
GPModel load_gp(const std::filesystem::path& path);

}  // namespace hwdse
