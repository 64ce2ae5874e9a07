#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hwdse/evaluator.hpp"

namespace hwdse {

struct RegressionDataset {
    Eigen::MatrixXd features;  // n x p, raw parameter values
    Eigen::VectorXd targets;
    std::vector<std::string> feature_names;

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index cols() const { return features.cols(); }
    /// Throws Data on shape mismatch or non-finite entries.
    void validate() const;

    static RegressionDataset from_dataset(const Dataset& data, const std::string& objective);
    RegressionDataset subset(const std::vector<Eigen::Index>& rows) const;
};

/// Seeded 80/20 style split: returns (train, test).
std::pair<RegressionDataset, RegressionDataset> train_test_split(const RegressionDataset& data, double test_fraction,
                                                                 std::uint64_t seed);

struct LinearModel {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;

    Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
};

/// Ordinary least squares through a column-pivoted QR of the centered design.
/// Throws SingularFit naming the collinear columns on rank deficiency.
LinearModel fit_linear(const RegressionDataset& data);

inline constexpr int kDefaultLassoLambdas = 100;

struct LassoPath {
    std::vector<double> lambdas;     // ascending
    Eigen::MatrixXd coefficients;    // |lambdas| x p, raw feature scale
    Eigen::MatrixXd standardized;    // same path on the standardized scale
    std::vector<double> intercepts;  // raw scale, per lambda
    /// Feature indices ordered by when they are driven to zero as lambda
    /// grows: first element collapses first, last element survives longest.
    std::vector<int> collapse_order;
    double lambda_max = 0.0;
};

/// Coordinate-descent LASSO over a log-spaced grid from lambda_max down to
/// lambda_max * 1e-4, warm-started, on standardized features and centered
/// targets. Objective: (1/2n) |y - X b|^2 + lambda |b|_1.
LassoPath fit_lasso_path(const RegressionDataset& data, int n_lambdas = kDefaultLassoLambdas);

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 16;  // negative: unlimited
    int min_leaf = 2;
    int features_per_split = 0;  // 0: ceil(p / 3)
    bool bootstrap_rows = true;
    std::uint64_t seed = 0;
};

class ForestModel {
  public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    using Tree = std::vector<Node>;

    explicit ForestModel(std::vector<Tree> trees) : trees_(std::move(trees)) {}

    double predict_one(std::span<const double> x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
    const std::vector<Tree>& trees() const { return trees_; }

  private:
    std::vector<Tree> trees_;
};

/// Random forest of CART regression trees: bootstrap row samples, variance
/// reduction splits over a random feature subset at each node, mean of tree
/// outputs as prediction. Deterministic per seed.
ForestModel fit_random_forest(const RegressionDataset& data, const ForestConfig& cfg);

/// sqrt(mean((actual - prediction)^2)) / mean(prediction).
double normalized_rmse(std::span<const double> predictions, std::span<const double> actuals);
double normalized_rmse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals);

}  // namespace hwdse
