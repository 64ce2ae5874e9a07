#include <doctest.h>

#include <algorithm>
#include <random>

#include "../support/oracles.hpp"
#include "hwdse/error.hpp"
#include "hwdse/pareto.hpp"

using namespace hwdse;

namespace {

std::vector<ObjectivePoint> pts(const std::vector<std::vector<double>>& vals) {
    std::vector<ObjectivePoint> out;
    for (std::size_t i = 0; i < vals.size(); ++i) out.push_back({{double(i)}, vals[i], Provenance::Evaluated});
    return out;
}

const std::vector<Direction> kMaxMax{Direction::Maximize, Direction::Maximize};

}  // namespace

TEST_CASE("dominance") {
    const auto p = pts({{2, 2}, {1, 1}, {1, 2}, {2, 1}});
    CHECK(dominates(p[0], p[1], kMaxMax));
    CHECK_FALSE(dominates(p[1], p[0], kMaxMax));
    CHECK_FALSE(dominates(p[2], p[3], kMaxMax));
    CHECK_FALSE(dominates(p[3], p[2], kMaxMax));
    CHECK_FALSE(dominates(p[0], p[0], kMaxMax));
    CHECK(dominates(p[1], p[0], {Direction::Minimize, Direction::Minimize}));
    try {
        dominates(p[0], {{0.0}, {1.0}, Provenance::Evaluated}, kMaxMax);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Argument);
    }
}

TEST_CASE("frontier basics") {
    const auto f = pareto_frontier(pts({{1, 1}, {2, 2}}), kMaxMax);
    REQUIRE(f.size() == 1);
    CHECK(f[0].values == std::vector<double>{2, 2});
    const auto same = pareto_frontier(pts({{3, 1}, {3, 1}, {3, 1}}), kMaxMax);
    REQUIRE(same.size() == 1);
    CHECK(same[0].params == ParameterVector{0.0});
    auto mixed = pts({{1, 2}, {2, 1}});
    mixed[1].provenance = Provenance::SurrogatePredicted;
    try {
        pareto_frontier(mixed, kMaxMax);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Configuration);
    }
}

TEST_CASE("frontier properties on random instances") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> U(0, 30);  // coarse values force ties and duplicates
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<double>> vals(120);
        for (auto& v : vals) v = {double(U(rng)), double(U(rng))};
        const std::vector<Direction> dirs{trial % 2 ? Direction::Minimize : Direction::Maximize, Direction::Maximize};
        const oracle::Vector sign{direction_sign(dirs[0]), direction_sign(dirs[1])};
        const auto input = pts(vals);
        const auto f = pareto_frontier(input, dirs);

        // exact match with the brute-force filter
        const auto idx = oracle::pareto_indices(vals, sign);
        std::vector<ParameterVector> expected, got;
        for (auto i : idx) expected.push_back(input[i].params);
        for (const auto& p : f) got.push_back(p.params);
        std::sort(expected.begin(), expected.end());
        std::sort(got.begin(), got.end());
        CHECK(got == expected);

        // sorted by first objective
        for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i - 1].values <= f[i].values);

        // nothing dominates a frontier member; everything else is dominated or a duplicate
        for (const auto& m : f)
            for (const auto& q : input) CHECK_FALSE(dominates(q, m, dirs));
        for (const auto& q : input) {
            bool covered = false;
            for (const auto& m : f) covered = covered || dominates(m, q, dirs) || m.values == q.values;
            CHECK(covered);
        }

        // permutation invariance as a set of objective vectors
        auto shuffled = input;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto g = pareto_frontier(shuffled, dirs);
        REQUIRE(g.size() == f.size());
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i].values == f[i].values);

        // flipping every direction on negated values gives the negated frontier
        auto negated = input;
        for (auto& p : negated)
            for (auto& v : p.values) v = -v;
        std::vector<Direction> flipped;
        for (auto d : dirs) flipped.push_back(d == Direction::Maximize ? Direction::Minimize : Direction::Maximize);
        const auto h = pareto_frontier(negated, flipped);
        std::vector<ParameterVector> hp;
        for (const auto& p : h) hp.push_back(p.params);
        std::sort(hp.begin(), hp.end());
        CHECK(hp == got);
    }
}
