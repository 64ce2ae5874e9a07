#include "hwdse/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/QR>

#include "hwdse/error.hpp"
#include "hwdse/rng.hpp"
#include "hwdse/text.hpp"

namespace hwdse {

void RegressionDataset::validate() const {
    if (features.rows() != targets.size())
        raise(ErrorCategory::Data, "regression data: " + std::to_string(features.rows()) + " feature rows but " +
                                       std::to_string(targets.size()) + " targets");
    if (features.cols() < 1) raise(ErrorCategory::Data, "regression data needs at least one feature");
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != features.cols())
        raise(ErrorCategory::Data, "regression data: feature name count does not match columns");
    if (!features.allFinite() || !targets.allFinite())
        raise(ErrorCategory::Data, "regression data contains non-finite entries");
}

RegressionDataset RegressionDataset::from_dataset(const Dataset& data, const std::string& objective) {
    RegressionDataset out;
    const auto y = data.objective_column(objective);
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto p = static_cast<Eigen::Index>(data.parameter_names.size());
    out.features.resize(n, p);
    out.targets.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j)
            out.features(i, j) = data.points[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        out.targets(i) = y[static_cast<std::size_t>(i)];
    }
    out.feature_names = data.parameter_names;
    out.validate();
    return out;
}

RegressionDataset RegressionDataset::subset(const std::vector<Eigen::Index>& rows) const {
    RegressionDataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.targets.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
        out.targets(static_cast<Eigen::Index>(i)) = targets(rows[i]);
    }
    out.feature_names = feature_names;
    return out;
}

std::pair<RegressionDataset, RegressionDataset> train_test_split(const RegressionDataset& data, double test_fraction,
                                                                 std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        raise(ErrorCategory::Configuration, "test fraction must lie strictly between 0 and 1");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.rows()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
    if (n_test == 0 || n_test >= idx.size()) raise(ErrorCategory::Data, "dataset too small to split");
    std::vector<Eigen::Index> test(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<Eigen::Index> train(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    return {data.subset(train), data.subset(test)};
}

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& features) const {
    if (features.cols() != coefficients.size())
        raise(ErrorCategory::Argument, "predict: feature count does not match the model");
    return (features * coefficients).array() + intercept;
}

namespace {

std::string column_label(const RegressionDataset& data, Eigen::Index j) {
    if (!data.feature_names.empty()) return data.feature_names[static_cast<std::size_t>(j)];
    return "x" + std::to_string(j + 1);
}

struct Standardized {
    Eigen::MatrixXd X;
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  // population standard deviation; 0 for constant columns
    Eigen::VectorXd y;      // centered
    double y_mean = 0.0;
};

Standardized standardize(const RegressionDataset& data) {
    Standardized s;
    const auto n = static_cast<double>(data.rows());
    s.mean = data.features.colwise().mean().transpose();
    s.X = data.features.rowwise() - s.mean.transpose();
    s.scale = (s.X.colwise().squaredNorm() / n).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < s.X.cols(); ++j)
        if (s.scale(j) > 0.0) s.X.col(j) /= s.scale(j);
    s.y_mean = data.targets.mean();
    s.y = data.targets.array() - s.y_mean;
    return s;
}

}  // namespace

LinearModel fit_linear(const RegressionDataset& data) {
    data.validate();
    const auto n = data.rows();
    const auto p = data.cols();
    if (n < p) raise(ErrorCategory::SingularFit, "linear fit needs at least as many rows as features");
    const auto s = standardize(data);

    std::vector<std::string> constant;
    for (Eigen::Index j = 0; j < p; ++j)
        if (!(s.scale(j) > 0.0)) constant.push_back(column_label(data, j));
    if (!constant.empty())
        raise(ErrorCategory::SingularFit, "singular fit: constant (collinear with intercept) columns: " +
                                              text::join(constant, ", "));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(s.X);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        std::vector<std::string> collinear;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index r = qr.rank(); r < p; ++r) collinear.push_back(column_label(data, perm(r)));
        raise(ErrorCategory::SingularFit, "singular fit: collinear columns: " + text::join(collinear, ", "));
    }
    const Eigen::VectorXd beta_std = qr.solve(s.y);
    LinearModel m;
    m.coefficients = beta_std.cwiseQuotient(s.scale);
    m.intercept = s.y_mean - s.mean.dot(m.coefficients);
    return m;
}

LassoPath fit_lasso_path(const RegressionDataset& data, int n_lambdas) {
    data.validate();
    if (n_lambdas < 2) raise(ErrorCategory::Configuration, "LASSO path needs at least two lambda values");
    constexpr double kTolerance = 1e-7;
    constexpr int kMaxSweeps = 10'000;
    constexpr double kMinRatio = 1e-4;

    const auto n = static_cast<double>(data.rows());
    const auto p = data.cols();
    const auto s = standardize(data);
    Eigen::VectorXd col_sq(p);
    for (Eigen::Index j = 0; j < p; ++j) col_sq(j) = s.X.col(j).squaredNorm() / n;

    double lambda_max = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) lambda_max = std::max(lambda_max, std::abs(s.X.col(j).dot(s.y) / n));

    // Descending grid for warm starts; stored ascending.
    std::vector<double> grid(static_cast<std::size_t>(n_lambdas));
    for (int i = 0; i < n_lambdas; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n_lambdas - 1);
        grid[static_cast<std::size_t>(i)] = i == 0 ? lambda_max : lambda_max * std::pow(kMinRatio, frac);
    }

    LassoPath path;
    path.lambda_max = lambda_max;
    path.standardized.resize(n_lambdas, p);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd r = s.y;
    for (int g = 0; g < n_lambdas; ++g) {
        const double lambda = grid[static_cast<std::size_t>(g)];
        int sweep = 0;
        for (;; ++sweep) {
            if (sweep >= kMaxSweeps)
                raise(ErrorCategory::Convergence, "LASSO coordinate descent did not converge at lambda " +
                                                      text::format_double(lambda));
            double max_change = 0.0;
            for (Eigen::Index j = 0; j < p; ++j) {
                if (!(col_sq(j) > 0.0)) continue;
                const double z = s.X.col(j).dot(r) / n + col_sq(j) * beta(j);
                const double shrunk = std::copysign(std::max(std::abs(z) - lambda, 0.0), z) / col_sq(j);
                const double delta = shrunk - beta(j);
                if (delta != 0.0) {
                    r -= delta * s.X.col(j);
                    beta(j) = shrunk;
                    max_change = std::max(max_change, std::abs(delta));
                }
            }
            if (max_change < kTolerance) break;
        }
        path.standardized.row(n_lambdas - 1 - g) = beta.transpose();
    }
    path.lambdas.assign(grid.rbegin(), grid.rend());

    path.coefficients.resize(n_lambdas, p);
    path.intercepts.resize(static_cast<std::size_t>(n_lambdas));
    for (int g = 0; g < n_lambdas; ++g) {
        for (Eigen::Index j = 0; j < p; ++j)
            path.coefficients(g, j) = s.scale(j) > 0.0 ? path.standardized(g, j) / s.scale(j) : 0.0;
        path.intercepts[static_cast<std::size_t>(g)] = s.y_mean - s.mean.dot(path.coefficients.row(g).transpose());
    }

    // A feature collapses at the largest lambda where it is still nonzero.
    std::vector<double> last_active(static_cast<std::size_t>(p), 0.0);
    for (Eigen::Index j = 0; j < p; ++j)
        for (int g = 0; g < n_lambdas; ++g)
            if (path.standardized(g, j) != 0.0) last_active[static_cast<std::size_t>(j)] = path.lambdas[static_cast<std::size_t>(g)];
    path.collapse_order.resize(static_cast<std::size_t>(p));
    std::iota(path.collapse_order.begin(), path.collapse_order.end(), 0);
    std::stable_sort(path.collapse_order.begin(), path.collapse_order.end(),
                     [&](int a, int b) { return last_active[static_cast<std::size_t>(a)] < last_active[static_cast<std::size_t>(b)]; });
    return path;
}

double ForestModel::predict_one(std::span<const double> x) const {
    if (trees_.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& tree : trees_) {
        int node = 0;
        while (tree[static_cast<std::size_t>(node)].feature >= 0) {
            const auto& nd = tree[static_cast<std::size_t>(node)];
            node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
        }
        sum += tree[static_cast<std::size_t>(node)].value;
    }
    return sum / static_cast<double>(trees_.size());
}

Eigen::VectorXd ForestModel::predict(const Eigen::MatrixXd& features) const {
    Eigen::VectorXd out(features.rows());
    std::vector<double> row(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        for (Eigen::Index j = 0; j < features.cols(); ++j) row[static_cast<std::size_t>(j)] = features(i, j);
        out(i) = predict_one(row);
    }
    return out;
}

namespace {

class TreeBuilder {
  public:
    TreeBuilder(const RegressionDataset& data, const ForestConfig& cfg, int features_per_split, std::uint64_t seed)
        : data_(data), cfg_(cfg), mtry_(features_per_split), rng_(seed) {}

    ForestModel::Tree build(std::vector<Eigen::Index> rows) {
        tree_.clear();
        grow(rows, 0);
        return std::move(tree_);
    }

  private:
    int grow(std::vector<Eigen::Index>& rows, int depth) {
        const int id = static_cast<int>(tree_.size());
        tree_.emplace_back();
        double sum = 0.0;
        double lo = data_.targets(rows.front()), hi = lo;
        for (auto r : rows) {
            const double y = data_.targets(r);
            sum += y;
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        const auto count = static_cast<double>(rows.size());
        tree_[static_cast<std::size_t>(id)].value = sum / count;

        const auto min_leaf = static_cast<std::size_t>(std::max(1, cfg_.min_leaf));
        if ((cfg_.max_depth >= 0 && depth >= cfg_.max_depth) || rows.size() < 2 * min_leaf || lo == hi) return id;

        const auto p = static_cast<int>(data_.cols());
        std::vector<int> features(static_cast<std::size_t>(p));
        std::iota(features.begin(), features.end(), 0);
        for (int i = 0; i < mtry_; ++i) {
            std::uniform_int_distribution<int> pick(i, p - 1);
            std::swap(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(pick(rng_))]);
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = -std::numeric_limits<double>::infinity();
        std::vector<Eigen::Index> sorted = rows;
        for (int fi = 0; fi < mtry_; ++fi) {
            const int f = features[static_cast<std::size_t>(fi)];
            std::sort(sorted.begin(), sorted.end(), [&](Eigen::Index a, Eigen::Index b) {
                return data_.features(a, f) < data_.features(b, f);
            });
            double left_sum = 0.0;
            for (std::size_t i = 1; i < sorted.size(); ++i) {
                left_sum += data_.targets(sorted[i - 1]);
                if (i < min_leaf || sorted.size() - i < min_leaf) continue;
                const double xl = data_.features(sorted[i - 1], f);
                const double xr = data_.features(sorted[i], f);
                if (!(xl < xr)) continue;
                const double nl = static_cast<double>(i);
                const double nr = count - nl;
                const double right_sum = sum - left_sum;
                // Maximizing this is equivalent to minimizing the children's SSE.
                const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (xl + xr);
                    if (!(best_threshold > xl && best_threshold < xr) && best_threshold != xl) best_threshold = xl;
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<Eigen::Index> left, right;
        for (auto r : rows) (data_.features(r, best_feature) <= best_threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        tree_[static_cast<std::size_t>(id)].feature = best_feature;
        tree_[static_cast<std::size_t>(id)].threshold = best_threshold;
        const int l = grow(left, depth + 1);
        tree_[static_cast<std::size_t>(id)].left = l;
        const int r = grow(right, depth + 1);
        tree_[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    const RegressionDataset& data_;
    const ForestConfig& cfg_;
    int mtry_;
    std::mt19937_64 rng_;
    ForestModel::Tree tree_;
};

}  // namespace

ForestModel fit_random_forest(const RegressionDataset& data, const ForestConfig& cfg) {
    data.validate();
    if (data.rows() < 2) raise(ErrorCategory::Data, "random forest needs at least two rows");
    if (cfg.n_trees < 1) raise(ErrorCategory::Configuration, "random forest needs at least one tree");
    if (cfg.min_leaf < 1) raise(ErrorCategory::Configuration, "min_leaf must be >= 1");
    const int p = static_cast<int>(data.cols());
    int mtry = cfg.features_per_split > 0 ? cfg.features_per_split : (p + 2) / 3;
    mtry = std::clamp(mtry, 1, p);

    const auto n = static_cast<std::size_t>(data.rows());
    std::vector<ForestModel::Tree> trees;
    trees.reserve(static_cast<std::size_t>(cfg.n_trees));
    for (int t = 0; t < cfg.n_trees; ++t) {
        const std::uint64_t tree_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
        std::vector<Eigen::Index> rows(n);
        if (cfg.bootstrap_rows) {
            std::mt19937_64 row_rng(derive_seed(tree_seed, 0));
            std::uniform_int_distribution<Eigen::Index> pick(0, static_cast<Eigen::Index>(n) - 1);
            for (auto& r : rows) r = pick(row_rng);
        } else {
            std::iota(rows.begin(), rows.end(), Eigen::Index{0});
        }
        TreeBuilder builder(data, cfg, mtry, derive_seed(tree_seed, 1));
        trees.push_back(builder.build(std::move(rows)));
    }
    return ForestModel(std::move(trees));
}

double normalized_rmse(std::span<const double> predictions, std::span<const double> actuals) {
    if (predictions.size() != actuals.size())
        raise(ErrorCategory::Argument, "normalized_rmse: prediction and actual counts differ");
    if (predictions.empty()) raise(ErrorCategory::Argument, "normalized_rmse: empty input");
    double sq = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = actuals[i] - predictions[i];
        sq += d * d;
        mean += predictions[i];
    }
    const auto n = static_cast<double>(predictions.size());
    mean /= n;
    if (mean == 0.0) raise(ErrorCategory::UndefinedNormalization, "normalized_rmse: mean prediction is zero");
    return std::sqrt(sq / n) / mean;
}

double normalized_rmse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals) {
    return normalized_rmse(std::span<const double>(predictions.data(), static_cast<std::size_t>(predictions.size())),
                           std::span<const double>(actuals.data(), static_cast<std::size_t>(actuals.size())));
}

}  // namespace hwdse
