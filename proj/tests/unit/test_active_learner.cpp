#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/helpers.hpp"
#include "../support/oracles.hpp"
#include "hwdse/active_learner.hpp"
#include "hwdse/error.hpp"
#include "hwdse/rng.hpp"

using namespace hwdse;

namespace {

/// Table evaluator over a full grid with a given function per objective.
std::unique_ptr<TableEvaluator> grid_table(const DesignSpace& space, const std::vector<std::string>& names,
                                           const std::function<std::vector<double>(const ParameterVector&)>& f) {
    Dataset d;
    d.parameter_names = space.parameter_names();
    d.objective_names = names;
    for (const auto& x : space.enumerate()) {
        d.points.push_back(x);
        d.values.push_back(f(x));
    }
    return make_table_evaluator(space, d);
}

/// Evaluator that negates one objective of another evaluator.
class Negated final : public Evaluator {
  public:
    explicit Negated(Evaluator& inner)
        : Evaluator(inner.space(),
                    [&] {
                        auto objs = inner.objectives();
                        for (auto& o : objs)
                            o.direction = o.direction == Direction::Maximize ? Direction::Minimize : Direction::Maximize;
                        return objs;
                    }()),
          inner_(inner) {}

  protected:
    std::vector<double> compute(const ParameterVector& x) const override {
        auto v = inner_.query(x);
        for (auto& e : v) e = -e;
        return v;
    }

  private:
    Evaluator& inner_;
};

/// Fails on a chosen set of points.
class Flaky final : public Evaluator {
  public:
    Flaky(Evaluator& inner, std::set<ParameterVector> bad)
        : Evaluator(inner.space(), inner.objectives()), inner_(inner), bad_(std::move(bad)) {}

  protected:
    std::vector<double> compute(const ParameterVector& x) const override {
        if (bad_.count(x)) raise(ErrorCategory::NotCovered, "simulated tool failure");
        return inner_.query(x);
    }

  private:
    Evaluator& inner_;
    std::set<ParameterVector> bad_;
};

RunConfig config_for(const Evaluator& ev, int n_init, int k, int iterations) {
    RunConfig cfg;
    for (const auto& o : ev.objectives()) cfg.objectives.push_back({o.name, o.direction, KernelSpec::squared_exponential(0.3), 1e-6});
    cfg.n_init = n_init;
    cfg.candidates_per_model = k;
    cfg.pool_size = 1000;
    cfg.max_iterations = iterations;
    cfg.patience = 1000;
    return cfg;
}

}  // namespace

TEST_CASE("initialize") {
    const auto one = DesignSpace({{"a", {2.0}}});
    CHECK(initialize(one, 1, 0) == std::vector<ParameterVector>{{2.0}});
    const auto space = testutil::grid_space(2, 5);
    const auto a = initialize(space, 7, 42), b = initialize(space, 7, 42);
    CHECK(a == b);
    CHECK(std::set<ParameterVector>(a.begin(), a.end()).size() == 7);
    const auto ten = testutil::grid_space(1, 10);
    const auto all = initialize(ten, 100, 1);
    CHECK(all.size() == 10);
    CHECK(std::set<ParameterVector>(all.begin(), all.end()).size() == 10);
    CHECK_THROWS_AS(initialize(space, 0, 1), Error);
}

TEST_CASE("sampling is uniform and avoids excluded points on large spaces") {
    const auto big = testutil::grid_space(8, 10);  // 1e8 points: rejection path
    std::set<ParameterVector> exclude{big.point_at(0)};
    const auto s = SearchDomain(big).sample_unvisited(500, exclude, 3);
    CHECK(s.size() == 500);
    CHECK(std::set<ParameterVector>(s.begin(), s.end()).size() == 500);
    CHECK(std::find(s.begin(), s.end(), big.point_at(0)) == s.end());
    double mean = 0;
    for (const auto& x : s) mean += x[0];
    CHECK(mean / 500 == doctest::Approx(4.5).epsilon(0.1));
}

TEST_CASE("proposals on a noise-free model return the best observed points") {
    const auto space = testutil::grid_space(1, 12);
    std::vector<ParameterVector> X;
    std::vector<double> y;
    for (int i = 0; i < 12; ++i) {
        X.push_back({double(i)});
        y.push_back(std::sin(0.9 * i));
    }
    const auto m = fit_gp(X, y, KernelSpec::squared_exponential(0.2), 0.0, Direction::Maximize, space.bounds());
    const auto got = propose_candidates({m}, space, 3, 12, 0.0, {}, 7);
    std::vector<int> idx(12);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return y[a] > y[b]; });
    REQUIRE(got.size() == 3);
    for (int r = 0; r < 3; ++r) CHECK(got[r] == X[idx[r]]);
}

TEST_CASE("two opposing models each contribute their own top k") {
    const auto space = testutil::grid_space(1, 10);
    std::vector<ParameterVector> X;
    std::vector<double> y;
    for (int i = 0; i < 10; ++i) {
        X.push_back({double(i)});
        y.push_back(i);
    }
    const auto up = fit_gp(X, y, KernelSpec::squared_exponential(0.3), 0.0, Direction::Maximize, space.bounds());
    const auto down = fit_gp(X, y, KernelSpec::squared_exponential(0.3), 0.0, Direction::Minimize, space.bounds());
    const auto got = propose_candidates({up, down}, space, 2, 10, 0.0, {}, 1);
    const std::set<ParameterVector> s(got.begin(), got.end());
    CHECK(got.size() == 4);
    for (double v : {9.0, 8.0, 0.0, 1.0}) CHECK(s.count({v}) == 1);
}

TEST_CASE("exploration weight lifts a far-from-data point") {
    const auto space = testutil::grid_space(1, 21);
    const std::vector<ParameterVector> X{{0}, {1}, {2}, {3}};
    const std::vector<double> y{0.0, 0.4, 0.5, 0.45};
    const auto m = fit_gp(X, y, KernelSpec::squared_exponential(0.15), 1e-6, Direction::Maximize, space.bounds());
    // Leave only the near point 4 and the far point 20 unvisited.
    std::set<ParameterVector> visited;
    for (int i = 0; i <= 20; ++i)
        if (i != 4 && i != 20) visited.insert({double(i)});
    // Score the near point 4 and the far point 20 with the dense oracle.
    const auto o = oracle::gp_posterior(0, 0.15, 1e-6 + m.jitter(), {0.0}, {20.0}, X, y, {{4.0}, {20.0}});
    auto score = [&](int i, double beta) { return o.mean[i] + beta * std::sqrt(o.var[i]); };
    CHECK(score(0, 0) > score(1, 0));
    CHECK(score(1, 10) > score(0, 10));
    const auto greedy = propose_candidates({m}, space, 1, 100, 0.0, visited, 3);
    const auto explore = propose_candidates({m}, space, 1, 100, 10.0, visited, 3);
    CHECK(greedy.front() == ParameterVector{4.0});
    CHECK(explore.front() == ParameterVector{20.0});
}

TEST_CASE("proposals are empty once everything is visited") {
    const auto space = testutil::grid_space(1, 3);
    const auto m = fit_gp({{0}, {1}, {2}}, {1, 2, 3}, KernelSpec{}, 0.0, Direction::Maximize, space.bounds());
    CHECK(propose_candidates({m}, space, 2, 10, 0.0, {{0}, {1}, {2}}, 1).empty());
}

TEST_CASE("stopping rule") {
    RunConfig cfg;
    cfg.objectives = {{"y", Direction::Maximize, KernelSpec{}, 1e-6}};
    cfg.max_iterations = 3;
    cfg.patience = 3;
    RunHistory h;
    h.objective_names = {"y"};
    h.directions = {Direction::Maximize};
    auto push = [&](double best) {
        IterationRecord r;
        r.best_so_far = {BestPoint{{0.0}, best, true}};
        h.iterations.push_back(r);
    };
    push(1.0);
    CHECK_FALSE(stopping_check(h, cfg));
    push(2.0);
    push(3.0);
    CHECK_FALSE(stopping_check(h, cfg));  // fresh improvement, two proposal iterations
    push(3.0);
    CHECK(stopping_check(h, cfg));  // max iterations
    cfg.max_iterations = 100;
    CHECK_FALSE(stopping_check(h, cfg));
    push(3.0);
    CHECK_FALSE(stopping_check(h, cfg));  // flat for 2
    push(3.0);
    CHECK(stopping_check(h, cfg));  // flat for exactly 3
    h.iterations.resize(2);
    h.exhausted = true;
    CHECK(stopping_check(h, cfg));
}

TEST_CASE("eight-point table: exhaustive runs find the optimum") {
    const auto ev = load_table_evaluator(testutil::fixture("table8.csv"), testutil::fixture("table8.manifest"));
    auto cfg = config_for(*ev, 2, 1, 100);
    const auto res = run_active_learning(cfg, *ev);
    const auto& last = res.history.iterations.back().best_so_far;
    CHECK(last[0].value == 5.5);
    CHECK(last[1].value == 1.0);
    CHECK(res.history.total_queries == 8);
    CHECK(res.history.exhausted);
    CHECK(res.models.size() == 2);
}

TEST_CASE("two-objective synthetic table matches a brute-force scan") {
    const auto space = testutil::grid_space(2, 8, {{"speed", Direction::Maximize}, {"cost", Direction::Minimize}});
    auto ev = grid_table(space, {"speed", "cost"}, [](const ParameterVector& x) {
        return std::vector<double>{std::sin(x[0]) + 0.3 * x[1], (x[0] - 3) * (x[0] - 3) + std::cos(x[1])};
    });
    double best_speed = -1e9, best_cost = 1e9;
    for (const auto& x : space.enumerate()) {
        const auto v = ev->query(x);
        best_speed = std::max(best_speed, v[0]);
        best_cost = std::min(best_cost, v[1]);
    }
    auto cfg = config_for(*ev, 4, 3, 1000);
    const auto res = run_active_learning(cfg, *ev);
    CHECK(res.history.iterations.back().best_so_far[0].value == best_speed);
    CHECK(res.history.iterations.back().best_so_far[1].value == best_cost);
}

TEST_CASE("run invariants") {
    const auto space = testutil::grid_space(3, 7);
    auto ev = make_synthetic_evaluator("multimodal", space, 5);
    auto cfg = config_for(*ev, 5, 4, 12);
    cfg.seed = 99;
    const auto a = run_active_learning(cfg, *ev);
    const auto b = run_active_learning(cfg, *ev);

    SUBCASE("determinism") {
        REQUIRE(a.history.iterations.size() == b.history.iterations.size());
        const auto qa = a.history.all_queries(), qb = b.history.all_queries();
        REQUIRE(qa.size() == qb.size());
        for (std::size_t i = 0; i < qa.size(); ++i) {
            CHECK(qa[i].point == qb[i].point);
            CHECK(qa[i].values == qb[i].values);
        }
    }
    SUBCASE("monotone bests, budget, no revisits") {
        const auto& h = a.history;
        for (std::size_t i = 1; i < h.iterations.size(); ++i)
            CHECK(h.iterations[i].best_so_far[0].value >= h.iterations[i - 1].best_so_far[0].value);
        CHECK(h.total_queries <= std::size_t(cfg.n_init + cfg.max_iterations * cfg.candidates_per_model));
        const auto q = h.all_queries();
        std::set<ParameterVector> seen;
        for (const auto& r : q) CHECK(seen.insert(r.point).second);
        CHECK(q.size() == h.total_queries);
    }
    SUBCASE("negating values and flipping direction proposes the same points") {
        Negated neg(*ev);
        auto ncfg = cfg;
        ncfg.objectives[0].direction = Direction::Minimize;
        const auto n = run_active_learning(ncfg, neg);
        const auto qa = a.history.all_queries(), qn = n.history.all_queries();
        REQUIRE(qa.size() == qn.size());
        for (std::size_t i = 0; i < qa.size(); ++i) CHECK(qa[i].point == qn[i].point);
    }
    SUBCASE("query budget cap") {
        auto capped = cfg;
        capped.max_queries = 13;
        const auto c = run_active_learning(capped, *ev);
        CHECK(c.history.total_queries == 13);
    }
}

TEST_CASE("failed evaluations are recorded and skipped") {
    const auto space = testutil::grid_space(2, 5);
    auto base = make_synthetic_evaluator("quadratic_bowl", space, 2);
    const auto init = initialize(space, 4, derive_seed(7, 0));
    Flaky flaky(*base, std::set<ParameterVector>{init[1]});
    auto cfg = config_for(flaky, 4, 2, 5);
    cfg.seed = 7;
    const auto res = run_active_learning(cfg, flaky);
    const auto q = res.history.all_queries();
    CHECK(q[1].failed);
    CHECK_FALSE(q[1].error.empty());
    CHECK(res.models[0].size() == res.history.total_queries - 1);

    Flaky broken(*base, std::set<ParameterVector>(init.begin(), init.end()));
    try {
        run_active_learning(cfg, broken);
        FAIL("expected abort");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Data);
    }
}

TEST_CASE("run configuration validation") {
    const auto space = testutil::grid_space(2, 5);
    auto ev = make_synthetic_evaluator("quadratic_bowl", space, 2);
    auto cfg = config_for(*ev, 4, 2, 5);
    auto expect_config = [&](RunConfig c) {
        try {
            run_active_learning(c, *ev);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.category() == ErrorCategory::Configuration);
        }
    };
    auto c1 = cfg;
    c1.n_init = 0;
    expect_config(c1);
    auto c2 = cfg;
    c2.pool_size = 1;
    expect_config(c2);
    auto c3 = cfg;
    c3.objectives.push_back(c3.objectives[0]);
    expect_config(c3);
    auto c4 = cfg;
    c4.exploration_beta = -1;
    expect_config(c4);
    auto c5 = cfg;
    c5.objectives[0].name = "nope";
    expect_config(c5);
}
