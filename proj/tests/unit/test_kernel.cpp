#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "hwdse/error.hpp"
#include "hwdse/kernel.hpp"

using namespace hwdse;

TEST_CASE("squared exponential at zero and fixed distances") {
    const auto se = KernelSpec::squared_exponential();
    const std::vector<double> a{0.3, 0.7}, b{0.3, 0.7};
    CHECK(kernel_eval(se, a, b) == 1.0);
    const std::vector<double> c{0.0, 0.0}, d{2.0, 0.0};  // squared distance 4
    CHECK(kernel_eval(se, c, d) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(kernel_eval(se, c, d) == doctest::Approx(0.135335).epsilon(1e-6));
}

TEST_CASE("matern 3/2 at unit distance") {
    const auto m = KernelSpec::matern(1.5, 1.0);
    const std::vector<double> a{0.0}, b{1.0};
    // (1 + sqrt3) exp(-sqrt3), evaluated independently in long double.
    const long double s3 = std::sqrt(3.0L);
    const double expected = static_cast<double>((1 + s3) * std::exp(-s3));
    CHECK(std::fabs(kernel_eval(m, a, b) - expected) < 1e-15);
    CHECK(std::fabs(kernel_eval(m, a, b) - 0.48335772459650765) < 1e-12);
}

TEST_CASE("kernels match closed forms, are symmetric and unit on the diagonal") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0, 1), L(0.1, 2.0);
    const KernelSpec specs[] = {KernelSpec::squared_exponential(), KernelSpec::matern(1.5), KernelSpec::matern(2.5)};
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t dim = 1 + trial % 4;
        std::vector<double> x(dim), y(dim);
        for (auto& v : x) v = U(rng);
        for (auto& v : y) v = U(rng);
        const double l = L(rng);
        for (int kind = 0; kind < 3; ++kind) {
            auto k = specs[kind];
            k.length_scale = l;
            CHECK(std::fabs(kernel_eval(k, x, y) - oracle::kernel(kind, x, y, l)) < 1e-12);
            CHECK(kernel_eval(k, x, y) == kernel_eval(k, y, x));
            CHECK(kernel_eval(k, x, x) == 1.0);
            const double v = kernel_eval(k, x, y);
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("matern 5/2 meets squared exponential at zero distance") {
    const auto se = KernelSpec::squared_exponential(0.5);
    const auto m = KernelSpec::matern(2.5, 0.5);
    CHECK(kernel_of_distance(se, 0.0) == kernel_of_distance(m, 0.0));
    double prev = 1.0;
    for (double r : {0.25, 0.2, 0.1, 0.05, 0.01, 0.001}) {
        const double gap = std::fabs(kernel_of_distance(m, r) - kernel_of_distance(se, r));
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("kernel validation and dimension checks") {
    CHECK_THROWS_AS(KernelSpec::matern(0.5).validate(), Error);
    CHECK_THROWS_AS(KernelSpec::squared_exponential(0.0).validate(), Error);
    CHECK_THROWS_AS(KernelSpec::squared_exponential(-1.0).validate(), Error);
    try {
        KernelSpec::matern(3.5).validate();
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Configuration);
    }
    const std::vector<double> a{1.0}, b{1.0, 2.0};
    try {
        kernel_eval(KernelSpec{}, a, b);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Argument);
    }
    CHECK_THROWS_AS(build_covariance(KernelSpec{}, std::vector<std::vector<double>>{{1.0}},
                                     std::vector<std::vector<double>>{{1.0, 2.0}}),
                    Error);
}

TEST_CASE("kernel names round trip") {
    for (std::string n : {"se", "matern32", "matern52"}) CHECK(kernel_name(parse_kernel_name(n)) == n);
    CHECK(parse_kernel_name("matern32").smoothness == 1.5);
    CHECK_THROWS_AS(parse_kernel_name("rbf"), Error);
}

TEST_CASE("covariance matrices") {
    const auto se = KernelSpec::squared_exponential();
    const std::vector<std::vector<double>> one{{0.2, 0.4}};
    const auto K1 = build_covariance(se, one, one);
    CHECK(K1.rows() == 1);
    CHECK(K1(0, 0) == 1.0);

    const std::vector<std::vector<double>> two{{0.0, 0.0}, {1.0, 1.0}};  // squared distance 2
    const auto K2 = build_covariance(se, two, two);
    CHECK(K2(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(K2(0, 1) == doctest::Approx(0.367879).epsilon(1e-6));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = trial < 10 ? 5 : 2 + trial % 19;
        std::vector<std::vector<double>> A(n, std::vector<double>(3));
        for (auto& row : A)
            for (auto& v : row) v = U(rng);
        for (int kind = 0; kind < 3; ++kind) {
            const KernelSpec k = kind == 0 ? KernelSpec::squared_exponential(0.4)
                                           : KernelSpec::matern(kind == 1 ? 1.5 : 2.5, 0.4);
            const auto K = build_covariance(k, A, A);
            oracle::Matrix M(n, oracle::Vector(n));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    M[i][j] = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    CHECK(M[i][j] == kernel_eval(k, A[i], A[j]));
                }
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(M[i][i] == 1.0);
                for (std::size_t j = 0; j < i; ++j) CHECK(M[i][j] == M[j][i]);
            }
            const auto ev = oracle::symmetric_eigenvalues(M);
            const double tol = n <= 5 ? 1e-10 : 1e-8;
            for (double e : ev) CHECK(e >= -tol);
        }
    }
}
