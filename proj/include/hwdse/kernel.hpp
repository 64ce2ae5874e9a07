#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hwdse {

enum class KernelFamily { SquaredExponential, Matern };

/// Stationary covariance kernel with unit signal variance. Inputs are expected
/// on the unit hypercube, so the default length scale of 1 reproduces the
/// plain exp(-|x - x'|^2 / 2) form.
struct KernelSpec {
    KernelFamily family = KernelFamily::SquaredExponential;
    double length_scale = 1.0;
    double smoothness = 2.5;  // Matern only: 1.5 or 2.5

    static KernelSpec squared_exponential(double length_scale = 1.0) {
        return {KernelFamily::SquaredExponential, length_scale, 2.5};
    }
    static KernelSpec matern(double smoothness, double length_scale = 1.0) {
        return {KernelFamily::Matern, length_scale, smoothness};
    }

    /// Throws a configuration error for l <= 0 or unsupported smoothness.
    void validate() const;

    bool operator==(const KernelSpec&) const = default;
};

/// Parses the CLI names se, matern32, matern52.
KernelSpec parse_kernel_name(const std::string& name, double length_scale = 1.0);
std::string kernel_name(const KernelSpec& kernel);

/// Kernel value as a function of Euclidean distance r >= 0.
double kernel_of_distance(const KernelSpec& kernel, double r);

double kernel_eval(const KernelSpec& kernel, std::span<const double> x, std::span<const double> x2);

/// |A| x |B| Gram matrix, rows of A and B being points.
Eigen::MatrixXd build_covariance(const KernelSpec& kernel, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
Eigen::MatrixXd build_covariance(const KernelSpec& kernel, const std::vector<std::vector<double>>& A,
                                 const std::vector<std::vector<double>>& B);

}  // namespace hwdse
