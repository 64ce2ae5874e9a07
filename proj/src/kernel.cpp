#include "hwdse/kernel.hpp"

#include <cmath>

#include "hwdse/error.hpp"
#include "hwdse/text.hpp"

namespace hwdse {

void KernelSpec::validate() const {
    if (!(length_scale > 0.0) || !std::isfinite(length_scale))
        raise(ErrorCategory::Configuration, "kernel length scale must be positive, got " + text::format_double(length_scale));
    if (family == KernelFamily::Matern && smoothness != 1.5 && smoothness != 2.5)
        raise(ErrorCategory::Configuration,
              "Matern smoothness must be 3/2 or 5/2, got " + text::format_double(smoothness));
}

KernelSpec parse_kernel_name(const std::string& name, double length_scale) {
    KernelSpec k;
    if (name == "se")
        k = KernelSpec::squared_exponential(length_scale);
    else if (name == "matern32")
        k = KernelSpec::matern(1.5, length_scale);
    else if (name == "matern52")
        k = KernelSpec::matern(2.5, length_scale);
    else
        raise(ErrorCategory::Configuration, "unknown kernel '" + name + "' (expected se, matern32 or matern52)");
    k.validate();
    return k;
}

std::string kernel_name(const KernelSpec& kernel) {
    if (kernel.family == KernelFamily::SquaredExponential) return "se";
    return kernel.smoothness == 1.5 ? "matern32" : "matern52";
}

double kernel_of_distance(const KernelSpec& kernel, double r) {
    const double s = r / kernel.length_scale;
    if (kernel.family == KernelFamily::SquaredExponential) return std::exp(-0.5 * s * s);
    // Half-integer Matern closed forms.
    if (kernel.smoothness == 1.5) {
        const double a = std::sqrt(3.0) * s;
        return (1.0 + a) * std::exp(-a);
    }
    if (kernel.smoothness == 2.5) {
        const double a = std::sqrt(5.0) * s;
        return (1.0 + a + a * a / 3.0) * std::exp(-a);
    }
    kernel.validate();
    return 0.0;
}

namespace {

double of_squared_distance(const KernelSpec& kernel, double sq) {
    if (kernel.family == KernelFamily::SquaredExponential) {
        const double l = kernel.length_scale;
        return std::exp(-sq / (2.0 * l * l));
    }
    return kernel_of_distance(kernel, std::sqrt(sq));
}

}  // namespace

double kernel_eval(const KernelSpec& kernel, std::span<const double> x, std::span<const double> x2) {
    if (x.size() != x2.size())
        raise(ErrorCategory::Argument, "kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                                           std::to_string(x2.size()) + ")");
    kernel.validate();
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x2[i];
        sq += d * d;
    }
    return of_squared_distance(kernel, sq);
}

Eigen::MatrixXd build_covariance(const KernelSpec& kernel, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.cols() != B.cols())
        raise(ErrorCategory::Argument, "build_covariance: dimension mismatch (" + std::to_string(A.cols()) + " vs " +
                                           std::to_string(B.cols()) + ")");
    kernel.validate();
    Eigen::MatrixXd K(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            double sq = 0.0;
            for (Eigen::Index c = 0; c < A.cols(); ++c) {
                const double d = A(i, c) - B(j, c);
                sq += d * d;
            }
            K(i, j) = of_squared_distance(kernel, sq);
        }
    }
    return K;
}

Eigen::MatrixXd build_covariance(const KernelSpec& kernel, const std::vector<std::vector<double>>& A,
                                 const std::vector<std::vector<double>>& B) {
    auto to_matrix = [](const std::vector<std::vector<double>>& pts, Eigen::Index dim) {
        Eigen::MatrixXd M(static_cast<Eigen::Index>(pts.size()), dim);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (static_cast<Eigen::Index>(pts[i].size()) != dim)
                raise(ErrorCategory::Argument, "build_covariance: points of differing dimension");
            for (Eigen::Index j = 0; j < dim; ++j) M(static_cast<Eigen::Index>(i), j) = pts[i][static_cast<std::size_t>(j)];
        }
        return M;
    };
    const Eigen::Index dim = !A.empty() ? static_cast<Eigen::Index>(A.front().size())
                             : !B.empty() ? static_cast<Eigen::Index>(B.front().size())
                                          : 0;
    return build_covariance(kernel, to_matrix(A, dim), to_matrix(B, dim));
}

}  // namespace hwdse
