#include "hwdse/gp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <Eigen/Cholesky>

#include "hwdse/error.hpp"
#include "hwdse/log.hpp"
#include "hwdse/text.hpp"

namespace hwdse {

namespace {

constexpr double kMaxJitter = 1e-2;

void check_finite(const std::vector<ParameterVector>& X, const std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i])) raise(ErrorCategory::Data, "non-finite observation at row " + std::to_string(i));
        for (double v : X[i])
            if (!std::isfinite(v)) raise(ErrorCategory::Data, "non-finite input at row " + std::to_string(i));
    }
}

}  // namespace

Eigen::MatrixXd GPModel::normalized(const std::vector<ParameterVector>& points) const {
    const auto d = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd M(static_cast<Eigen::Index>(points.size()), d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dimension())
            raise(ErrorCategory::Argument, "query has " + std::to_string(points[i].size()) +
                                               " coordinates, model expects " + std::to_string(dimension()));
        const auto u = bounds_.normalize(points[i]);
        for (Eigen::Index j = 0; j < d; ++j) M(static_cast<Eigen::Index>(i), j) = u[static_cast<std::size_t>(j)];
    }
    return M;
}

void GPModel::factorize(std::optional<double> fixed_jitter) {
    x_norm_ = normalized(inputs_);
    const auto n = static_cast<Eigen::Index>(inputs_.size());
    y_std_vec_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) y_std_vec_(i) = (targets_[static_cast<std::size_t>(i)] - y_mean_) / y_std_;

    Eigen::MatrixXd K = build_covariance(kernel_, x_norm_, x_norm_);
    K.diagonal().array() += noise_variance_;

    auto attempt = [&](double jitter) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) return false;
        Eigen::MatrixXd L = llt.matrixL();
        if (!L.allFinite()) return false;
        chol_ = std::move(L);
        jitter_ = jitter;
        return true;
    };

    bool ok = false;
    if (fixed_jitter) {
        ok = attempt(*fixed_jitter);
    } else {
        // Try the bare matrix first; escalate only when the factorization fails.
        ok = attempt(0.0);
        double jitter = 1e-8 * K.trace() / static_cast<double>(n);
        while (!ok && jitter <= kMaxJitter * (1.0 + 1e-12)) {
            ok = attempt(jitter);
            if (!ok) jitter *= 10.0;
        }
        if (ok && jitter_ > 0.0) logger()->warn("GP covariance needed jitter {:g} to factorize", jitter_);
    }
    if (!ok) raise(ErrorCategory::Numerical, "GP covariance factorization failed after jitter escalation");

    alpha_ = chol_.triangularView<Eigen::Lower>().solve(y_std_vec_);
    chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
}

Posterior GPModel::posterior(const std::vector<ParameterVector>& queries) const {
    Posterior out;
    if (queries.empty()) return out;
    const Eigen::MatrixXd Q = normalized(queries);
    const Eigen::MatrixXd Kq = build_covariance(kernel_, x_norm_, Q);  // n x q
    const Eigen::VectorXd mean = Kq.transpose() * alpha_;
    const Eigen::MatrixXd V = chol_.triangularView<Eigen::Lower>().solve(Kq);
    const Eigen::VectorXd explained = V.colwise().squaredNorm().transpose();
    out.means.resize(queries.size());
    out.variances.resize(queries.size());
    const double scale2 = y_std_ * y_std_;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out.means[i] = y_mean_ + y_std_ * mean(k);
        out.variances[i] = scale2 * std::max(0.0, 1.0 - explained(k));
    }
    return out;
}

JointPosterior GPModel::posterior_joint(const std::vector<ParameterVector>& queries) const {
    JointPosterior out;
    const Eigen::MatrixXd Q = normalized(queries);
    const Eigen::MatrixXd Kq = build_covariance(kernel_, x_norm_, Q);
    const Eigen::VectorXd mean = Kq.transpose() * alpha_;
    const Eigen::MatrixXd V = chol_.triangularView<Eigen::Lower>().solve(Kq);
    Eigen::MatrixXd cov = build_covariance(kernel_, Q, Q);
    cov.noalias() -= V.transpose() * V;
    cov = 0.5 * (cov + cov.transpose()).eval();
    cov.diagonal() = cov.diagonal().cwiseMax(0.0);
    cov *= y_std_ * y_std_;
    out.means.resize(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) out.means[i] = y_mean_ + y_std_ * mean(static_cast<Eigen::Index>(i));
    out.covariance = std::move(cov);
    return out;
}

GPModel fit_gp(const std::vector<ParameterVector>& X, const std::vector<double>& y, const KernelSpec& kernel,
               double noise_variance, Direction direction, const InputBounds& bounds, std::string name) {
    if (X.size() != y.size())
        raise(ErrorCategory::Argument, "fit_gp: " + std::to_string(X.size()) + " inputs but " +
                                           std::to_string(y.size()) + " observations");
    if (X.empty()) raise(ErrorCategory::Argument, "fit_gp: empty training set");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        raise(ErrorCategory::Configuration, "fit_gp: noise variance must be nonnegative");
    kernel.validate();
    for (const auto& x : X)
        if (x.size() != bounds.dimension())
            raise(ErrorCategory::Argument, "fit_gp: input of dimension " + std::to_string(x.size()) +
                                               ", bounds of dimension " + std::to_string(bounds.dimension()));
    check_finite(X, y);

    // Merge duplicate rows, keeping first-appearance order.
    std::map<ParameterVector, std::size_t> slot;
    std::vector<ParameterVector> inputs;
    std::vector<double> sums;
    std::vector<int> counts;
    std::vector<double> first_value;
    bool conflicting = false;
    for (std::size_t i = 0; i < X.size(); ++i) {
        auto [it, inserted] = slot.try_emplace(X[i], inputs.size());
        if (inserted) {
            inputs.push_back(X[i]);
            sums.push_back(y[i]);
            counts.push_back(1);
            first_value.push_back(y[i]);
        } else {
            sums[it->second] += y[i];
            counts[it->second] += 1;
            conflicting = conflicting || y[i] != first_value[it->second];
        }
    }
    if (conflicting) logger()->warn("fit_gp: duplicate inputs with conflicting observations were averaged");

    GPModel model;
    model.inputs_ = std::move(inputs);
    model.targets_.resize(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i)
        model.targets_[i] = counts[i] == 1 ? sums[i] : sums[i] / counts[i];
    model.kernel_ = kernel;
    model.noise_variance_ = noise_variance;
    model.bounds_ = bounds;
    model.direction_ = direction;
    model.name_ = std::move(name);

    const auto& t = model.targets_;
    const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    if (*lo == *hi) {
        model.y_mean_ = t.front();
        model.y_std_ = 1.0;
    } else {
        double mean = 0.0;
        for (double v : t) mean += v;
        mean /= static_cast<double>(t.size());
        double var = 0.0;
        for (double v : t) var += (v - mean) * (v - mean);
        var /= static_cast<double>(t.size());
        model.y_mean_ = mean;
        model.y_std_ = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    model.factorize(std::nullopt);
    return model;
}

GPModel fit_gp(const std::vector<ParameterVector>& X, const std::vector<double>& y, const KernelSpec& kernel,
               double noise_variance, Direction direction) {
    return fit_gp(X, y, kernel, noise_variance, direction, InputBounds::from_points(X));
}

// Model file layout (one item per line, whitespace separated):
//   hwdse-gp 1
//   name "<objective>"
//   kernel se <l> | kernel matern <l> <nu>
//   direction maximize|minimize
//   noise_variance <v>
//   jitter <v>
//   dimension <d>
//   n_train <n>
//   lower <d values>
//   upper <d values>
//   y_mean <v>
//   y_std <v>
//   data
//   <x_1 .. x_d y>   x n rows, raw inputs and original-scale observations
void save_gp(const GPModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCategory::Configuration, "cannot write model file '" + path.string() + "'");
    using text::format_double;
    const auto& k = model.kernel();
    out << "hwdse-gp 1\n";
    out << "name " << std::quoted(model.name()) << '\n';
    if (k.family == KernelFamily::SquaredExponential)
        out << "kernel se " << format_double(k.length_scale) << '\n';
    else
        out << "kernel matern " << format_double(k.length_scale) << ' ' << format_double(k.smoothness) << '\n';
    out << "direction " << to_string(model.direction()) << '\n';
    out << "noise_variance " << format_double(model.noise_variance()) << '\n';
    out << "jitter " << format_double(model.jitter()) << '\n';
    out << "dimension " << model.dimension() << '\n';
    out << "n_train " << model.size() << '\n';
    out << "lower";
    for (double v : model.bounds().lower) out << ' ' << format_double(v);
    out << "\nupper";
    for (double v : model.bounds().upper) out << ' ' << format_double(v);
    out << "\ny_mean " << format_double(model.y_mean()) << '\n';
    out << "y_std " << format_double(model.y_std()) << '\n';
    out << "data\n";
    for (std::size_t i = 0; i < model.size(); ++i) {
        for (double v : model.inputs()[i]) out << format_double(v) << ' ';
        out << format_double(model.targets()[i]) << '\n';
    }
    if (!out) raise(ErrorCategory::Configuration, "failed writing model file '" + path.string() + "'");
}

namespace {

class ModelReader {
  public:
    ModelReader(std::istream& in, std::string origin) : in_(in), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& what) const {
        raise(ErrorCategory::Format, origin_ + ":" + std::to_string(line_no_) + ": " + what);
    }

    /// Next line, whose first token must equal `key`; returns the remaining tokens.
    std::vector<std::string> expect(const std::string& key) {
        std::string line;
        if (!std::getline(in_, line)) {
            ++line_no_;
            fail("unexpected end of file, expected '" + key + "'");
        }
        ++line_no_;
        std::istringstream ss(line);
        std::string first;
        ss >> first;
        if (first != key) fail("expected field '" + key + "', found '" + first + "'");
        std::vector<std::string> rest;
        if (key == "name") {
            std::string name;
            if (!(ss >> std::quoted(name))) fail("malformed name");
            rest.push_back(name);
            return rest;
        }
        std::string tok;
        while (ss >> tok) rest.push_back(tok);
        return rest;
    }

    double number(const std::string& tok, const std::string& field) const {
        const auto v = text::parse_double(tok);
        if (!v) fail("field '" + field + "': '" + tok + "' is not a number");
        return *v;
    }

    double scalar(const std::string& key) {
        const auto toks = expect(key);
        if (toks.size() != 1) fail("field '" + key + "' expects one value");
        return number(toks[0], key);
    }

    std::size_t count(const std::string& key) {
        const double v = scalar(key);
        if (v < 0 || v != std::floor(v)) fail("field '" + key + "' must be a nonnegative integer");
        return static_cast<std::size_t>(v);
    }

    std::vector<double> vector(const std::string& key, std::size_t expected) {
        const auto toks = expect(key);
        if (toks.size() != expected)
            fail("field '" + key + "' has " + std::to_string(toks.size()) + " values, dimension header says " +
                 std::to_string(expected));
        std::vector<double> out;
        for (const auto& t : toks) out.push_back(number(t, key));
        return out;
    }

    std::vector<double> row(std::size_t expected) {
        std::string line;
        ++line_no_;
        if (!std::getline(in_, line)) fail("unexpected end of file in data block");
        std::istringstream ss(line);
        std::vector<double> out;
        std::string tok;
        while (ss >> tok) out.push_back(number(tok, "data"));
        if (out.size() != expected)
            fail("data row has " + std::to_string(out.size()) + " values, expected " + std::to_string(expected));
        return out;
    }

    void expect_end() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!text::trim(line).empty()) fail("trailing content after data block");
        }
    }

  private:
    std::istream& in_;
    std::string origin_;
    int line_no_ = 0;
};

}  // namespace

GPModel load_gp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCategory::Configuration, "cannot open model file '" + path.string() + "'");
    ModelReader r(in, path.string());

    const auto header = r.expect("hwdse-gp");
    if (header.size() != 1 || header[0] != "1") r.fail("unsupported model file version");

    GPModel model;
    model.name_ = r.expect("name").at(0);

    const auto kern = r.expect("kernel");
    if (kern.size() == 2 && kern[0] == "se") {
        model.kernel_ = KernelSpec::squared_exponential(r.number(kern[1], "kernel"));
    } else if (kern.size() == 3 && kern[0] == "matern") {
        model.kernel_ = KernelSpec::matern(r.number(kern[2], "kernel"), r.number(kern[1], "kernel"));
    } else {
        r.fail("malformed kernel block");
    }
    try {
        model.kernel_.validate();
    } catch (const Error& e) {
        r.fail(e.what());
    }

    const auto dir = r.expect("direction");
    if (dir.size() != 1) r.fail("field 'direction' expects one value");
    try {
        model.direction_ = parse_direction(dir[0]);
    } catch (const Error& e) {
        r.fail(e.what());
    }

    model.noise_variance_ = r.scalar("noise_variance");
    const double jitter = r.scalar("jitter");
    if (model.noise_variance_ < 0 || jitter < 0) r.fail("noise_variance and jitter must be nonnegative");
    const std::size_t d = r.count("dimension");
    const std::size_t n = r.count("n_train");
    if (d == 0) r.fail("dimension must be positive");
    if (n == 0) r.fail("n_train must be positive");
    model.bounds_.lower = r.vector("lower", d);
    model.bounds_.upper = r.vector("upper", d);
    model.y_mean_ = r.scalar("y_mean");
    model.y_std_ = r.scalar("y_std");
    if (!(model.y_std_ > 0)) r.fail("y_std must be positive");
    if (!r.expect("data").empty()) r.fail("'data' takes no values");
    for (std::size_t i = 0; i < n; ++i) {
        auto values = r.row(d + 1);
        model.targets_.push_back(values.back());
        values.pop_back();
        model.inputs_.push_back(std::move(values));
    }
    r.expect_end();
    model.factorize(jitter);
    return model;
}

}  // namespace hwdse
