#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/helpers.hpp"
#include "../support/oracles.hpp"
#include "hwdse/active_learner.hpp"
#include "hwdse/error.hpp"
#include "hwdse/transfer.hpp"

using namespace hwdse;

namespace {

struct Pair {
    GPModel target, source;
    std::vector<ParameterVector> queries;
};

Pair fixture_models() {
    const std::vector<ParameterVector> Xt{{0, 0}, {1, 2}, {2, 1}, {3, 3}};
    const std::vector<double> yt{1.0, 2.5, 2.0, 4.0};
    const std::vector<ParameterVector> Xs{{0, 1}, {1, 1}, {3, 0}, {2, 3}, {1, 3}};
    const std::vector<double> ys{10.0, 12.0, 11.0, 15.0, 13.5};
    const InputBounds box{{0, 0}, {3, 3}};
    return {fit_gp(Xt, yt, KernelSpec::squared_exponential(0.5), 1e-6, Direction::Maximize, box),
            fit_gp(Xs, ys, KernelSpec::matern(2.5, 0.6), 1e-6, Direction::Maximize, box),
            {{0.5, 0.5}, {2, 2}, {3, 0}, {1.5, 2.5}}};
}

}  // namespace

TEST_CASE("blending identities") {
    const auto f = fixture_models();
    const auto t = f.target.posterior(f.queries);
    const auto zero = combine_posterior(f.target, f.source, 0.0, 0.0, f.queries);
    for (std::size_t i = 0; i < f.queries.size(); ++i) {
        CHECK(std::fabs(zero.means[i] - t.means[i]) <= 1e-12);
        CHECK(std::fabs(zero.variances[i] - t.variances[i]) <= 1e-12);
    }
    const auto twice = combine_posterior(f.target, f.target, 1.0, 0.0, f.queries);
    for (std::size_t i = 0; i < f.queries.size(); ++i) CHECK(twice.means[i] == doctest::Approx(2 * t.means[i]));
}

TEST_CASE("blend at lambda1 = 0.5 matches dense posteriors") {
    const auto f = fixture_models();
    const auto ot = oracle::gp_posterior(0, 0.5, 1e-6 + f.target.jitter(), {0, 0}, {3, 3}, f.target.inputs(),
                                         f.target.targets(), f.queries);
    const auto os = oracle::gp_posterior(2, 0.6, 1e-6 + f.source.jitter(), {0, 0}, {3, 3}, f.source.inputs(),
                                         f.source.targets(), f.queries);
    const auto c = combine_posterior(f.target, f.source, 0.5, 0.25, f.queries);
    for (std::size_t i = 0; i < f.queries.size(); ++i) {
        CHECK(std::fabs(c.means[i] - (ot.mean[i] + 0.5 * os.mean[i])) < 1e-8);
        CHECK(std::fabs(c.variances[i] - (ot.var[i] + 0.25 * os.var[i])) < 1e-8);
    }
}

TEST_CASE("blend is linear in lambda1") {
    const auto f = fixture_models();
    const auto t = f.target.posterior(f.queries);
    for (auto [a, b] : {std::pair{0.1, 0.3}, std::pair{0.5, 0.5}, std::pair{0.0, 0.9}}) {
        const auto ca = combine_posterior(f.target, f.source, a, 0.0, f.queries);
        const auto cb = combine_posterior(f.target, f.source, b, 0.0, f.queries);
        const auto cab = combine_posterior(f.target, f.source, a + b, 0.0, f.queries);
        for (std::size_t i = 0; i < f.queries.size(); ++i)
            CHECK(std::fabs(ca.means[i] + cb.means[i] - t.means[i] - cab.means[i]) < 1e-10);
    }
}

TEST_CASE("blend errors") {
    const auto f = fixture_models();
    const auto one_d = fit_gp({{0.0}, {1.0}}, {1.0, 2.0}, KernelSpec{});
    try {
        combine_posterior(f.target, one_d, 0.5, 0.0, f.queries);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Configuration);
    }
    CHECK_THROWS_AS(combine_posterior(f.target, f.source, -0.1, 0.0, f.queries), Error);
}

TEST_CASE("lambda schedule") {
    CHECK(lambda_schedule(0, 10, 0.5) == 0.5);
    CHECK(lambda_schedule(10, 10, 0.5) == 0.0);
    CHECK(lambda_schedule(5, 10, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    double prev = 1.0;
    for (int i = 0; i <= 7; ++i) {
        const double v = lambda_schedule(i, 7, 0.8);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(lambda_schedule(11, 10, 0.5), Error);
    CHECK_THROWS_AS(lambda_schedule(0, 0, 0.5), Error);
}

TEST_CASE("task correlation") {
    const std::vector<double> a{1, 2, 3, 4}, b{1.1, 1.9, 3.2, 3.8};
    CHECK(task_correlation(a, a).rho == 1.0);
    CHECK(task_correlation(a, a).pvalue == 0.0);
    std::vector<double> neg{-1, -2, -3, -4};
    CHECK(task_correlation(a, neg).rho == -1.0);
    const auto c = task_correlation(a, b);
    CHECK(std::fabs(c.rho - oracle::pearson(a, b)) < 1e-10);
    CHECK(std::fabs(c.rho - 0.9908470001860921) < 1e-10);
    CHECK(c.pvalue == doctest::Approx(0.009152999813907936).epsilon(1e-8));
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8}, y{2, 1, 4, 3, 7, 5, 6, 9};
    CHECK(task_correlation(x, y).rho == doctest::Approx(0.8848892592150239).epsilon(1e-12));
    CHECK(task_correlation(x, y).pvalue == doctest::Approx(0.0034915574886272204).epsilon(1e-8));
    try {
        task_correlation(a, std::vector<double>{2, 2, 2, 2});
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::UndefinedCorrelation);
    }
    CHECK_THROWS_AS(task_correlation(std::vector<double>{1, 2}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("transfer with zero weights reproduces the plain run; vanishing weight at the final step") {
    const auto space = testutil::grid_space(3, 8);
    auto ev = make_synthetic_evaluator("correlated_pair", space, 21);
    std::vector<ParameterVector> Xs;
    std::vector<double> ys;
    for (const auto& x : initialize(space, 40, 5)) {
        Xs.push_back(x);
        ys.push_back(ev->query(x)[0]);
    }
    auto source = std::make_shared<const GPModel>(
        fit_gp(Xs, ys, KernelSpec::squared_exponential(0.3), 1e-6, Direction::Maximize, space.bounds(), "source"));

    RunConfig cfg;
    cfg.objectives = {{"target", Direction::Maximize, KernelSpec::squared_exponential(0.3), 1e-6}};
    cfg.n_init = 4;
    cfg.candidates_per_model = 3;
    cfg.max_iterations = 8;
    cfg.patience = 100;
    cfg.seed = 17;
    const auto plain = run_active_learning(cfg, *ev);

    auto with = cfg;
    TransferConfig t;
    t.source_model = source;
    t.lambda1_initial = 0.0;
    with.transfer = t;
    const auto zero = run_active_learning(with, *ev);
    const auto qa = plain.history.all_queries(), qb = zero.history.all_queries();
    REQUIRE(qa.size() == qb.size());
    for (std::size_t i = 0; i < qa.size(); ++i) CHECK(qa[i].point == qb[i].point);

    // At lambda = 0 the blended scores equal the target's, so proposals agree
    // given the same models, visited set and seed.
    const auto& models = plain.models;
    std::set<ParameterVector> visited;
    for (const auto& q : qa) visited.insert(q.point);
    ScoringTransfer vanishing{source.get(), 0, lambda_schedule(7, 7, 0.5), 0.0};
    CHECK(vanishing.lambda1 == 0.0);
    const auto p1 = propose_candidates(models, SearchDomain(space), 3, 200, 0.0, visited, 4);
    const auto p2 = propose_candidates(models, SearchDomain(space), 3, 200, 0.0, visited, 4, vanishing);
    CHECK(p1 == p2);

    t.lambda1_initial = 0.5;
    t.objective = "missing";
    with.transfer = t;
    CHECK_THROWS_AS(run_active_learning(with, *ev), Error);
}
