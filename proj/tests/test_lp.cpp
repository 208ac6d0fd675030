#include <random>

#include "doctest.h"
#include "lp_oracle.hpp"
#include "salb/lp.hpp"

using namespace salb;

namespace {

LpProblem example_two() {
    // max x1 + x2 s.t. 3x1 + 4x2 <= 9
    LpProblem lp;
    lp.add_column(0, 1);
    lp.add_column(0, 1);
    lp.add_row({{0, 3.0}, {1, 4.0}}, RowSense::less_equal, 9.0);
    lp.set_objective({{0, 1.0}, {1, 1.0}}, ObjSense::maximize);
    return lp;
}

}  // namespace

TEST_CASE("min x1 over the unit simplex row") {
    LpProblem lp;
    lp.add_column(0, 1);
    lp.add_column(0, 1);
    lp.add_row({{0, 1.0}, {1, 1.0}}, RowSense::equal, 1.0);
    lp.set_objective({{0, 1.0}}, ObjSense::minimize);
    auto sol = lp.solve();
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(0.0));
    CHECK(sol.x[0] == doctest::Approx(0.0));
    CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("knapsack row with slack reaches the box corner") {
    auto lp = example_two();
    auto sol = lp.solve();
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(2.0));
    CHECK(sol.x[0] == doctest::Approx(1.0));
    CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("contradictory rows are infeasible") {
    LpProblem lp;
    lp.add_column(0, 1);
    lp.add_row({{0, 1.0}}, RowSense::greater_equal, 0.6);
    lp.add_row({{0, 1.0}}, RowSense::less_equal, 0.4);
    CHECK(lp.solve().status == LpStatus::infeasible);
}

TEST_CASE("add_row tightens and warm-starts") {
    auto lp = example_two();
    REQUIRE(lp.solve().objective == doctest::Approx(2.0));

    SUBCASE("cut x1 + x2 <= 1") {
        lp.add_row({{0, 1.0}, {1, 1.0}}, RowSense::less_equal, 1.0);
        auto sol = lp.solve();
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(1.0));
    }
    SUBCASE("row already satisfied") {
        lp.add_row({{0, 1.0}}, RowSense::less_equal, 1.0);
        auto sol = lp.solve();
        CHECK(sol.objective == doctest::Approx(2.0));
    }
    SUBCASE("empty row 0 <= -1") {
        lp.add_row(std::initializer_list<LpTerm>{}, RowSense::less_equal, -1.0);
        CHECK(lp.solve().status == LpStatus::infeasible);
    }
}

TEST_CASE("set_bounds") {
    SUBCASE("fixing x1 to zero") {
        auto lp = example_two();
        lp.solve();
        lp.set_bounds(0, 0, 0);
        auto sol = lp.solve();
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(1.0));
        CHECK(sol.x[0] == doctest::Approx(0.0));
        CHECK(sol.x[1] == doctest::Approx(1.0));
    }
    SUBCASE("free bounds change nothing") {
        auto lp = example_two();
        auto before = lp.solve();
        lp.set_bounds(1, 0, 1);
        auto after = lp.solve();
        CHECK(after.objective == doctest::Approx(before.objective));
        CHECK(after.x == before.x);
    }
    SUBCASE("two ones in one SOS row") {
        LpProblem lp;
        for (int c = 0; c < 3; ++c) lp.add_column(0, 1);
        lp.add_row({{0, 1.0}, {1, 1.0}, {2, 1.0}}, RowSense::equal, 1.0);
        lp.set_bounds(0, 1, 1);
        lp.set_bounds(2, 1, 1);
        CHECK(lp.solve().status == LpStatus::infeasible);
    }
    SUBCASE("lo above hi is rejected") {
        auto lp = example_two();
        CHECK_THROWS_AS(lp.set_bounds(0, 1, 0), std::invalid_argument);
        CHECK_THROWS_AS(lp.set_bounds(0, -0.5, 1), std::invalid_argument);
    }
}

TEST_CASE("warm start from an exported basis") {
    auto lp = example_two();
    lp.add_row({{0, 1.0}, {1, 1.0}}, RowSense::less_equal, 1.5);
    auto first = lp.solve();
    auto basis = lp.basis();
    lp.set_bounds(0, 0, 0.5);
    auto moved = lp.solve();
    lp.set_bounds(0, 0, 1);
    auto back = lp.solve(basis);
    CHECK(back.objective == doctest::Approx(first.objective));
    CHECK(moved.objective <= first.objective + 1e-9);
}

TEST_CASE("random block LPs match vertex enumeration") {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 150; ++trial) {
        LpProblem lp;
        auto expected = testing::random_block_lp(rng, lp);
        auto sol = lp.solve();
        CAPTURE(trial);
        if (!expected) {
            CHECK(sol.status == LpStatus::infeasible);
            continue;
        }
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(*expected).epsilon(1e-9).scale(1.0));
        CHECK(lp.max_violation(sol.x) <= 1e-7);
    }
}

TEST_CASE("added rows never improve a minimisation") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        LpProblem lp;
        auto expected = testing::random_block_lp(rng, lp);
        if (!expected) continue;
        double prev = lp.solve().objective;
        for (int r = 0; r < 4; ++r) {
            std::vector<LpTerm> terms;
            for (int c = 0; c < lp.num_cols(); ++c)
                if (rng() % 3 == 0) terms.push_back({c, static_cast<double>(1 + rng() % 4)});
            lp.add_row(terms, RowSense::less_equal, static_cast<double>(rng() % 6));
            auto sol = lp.solve();
            if (sol.status == LpStatus::infeasible) break;
            REQUIRE(sol.status == LpStatus::optimal);
            CHECK(sol.objective >= prev - 1e-7);
            CHECK(lp.max_violation(sol.x) <= 1e-7);
            prev = sol.objective;
        }
    }
}

TEST_CASE("removing added rows restores the original optimum") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 80; ++trial) {
        LpProblem lp;
        auto expected = testing::random_block_lp(rng, lp);
        if (!expected) continue;
        const int base = lp.num_rows();
        for (int r = 0; r < 5; ++r) {
            std::vector<LpTerm> terms;
            for (int c = 0; c < lp.num_cols(); ++c)
                if (rng() % 3 == 0) terms.push_back({c, static_cast<double>(1 + rng() % 4)});
            // Loose rows keep their slack basic, tight ones usually do not.
            const double rhs = rng() % 2 ? static_cast<double>(terms.size() * 4) : static_cast<double>(rng() % 4);
            lp.add_row(terms, RowSense::less_equal, rhs);
        }
        auto cut = lp.solve();
        if (cut.status != LpStatus::optimal) continue;
        const LpBasis snapshot = lp.basis();

        std::vector<int> drop;
        for (int r = base; r < lp.num_rows(); ++r)
            if (rng() % 2) drop.push_back(r);
        const auto map = lp.remove_rows(drop);
        CAPTURE(trial);
        REQUIRE(static_cast<int>(map.size()) == base + 5);
        CHECK(lp.num_rows() == base + 5 - static_cast<int>(drop.size()));
        for (int r = 0; r < base; ++r) CHECK(map[static_cast<std::size_t>(r)] == r);

        auto mid = lp.solve();
        REQUIRE(mid.status == LpStatus::optimal);
        CHECK(mid.objective <= cut.objective + 1e-7);
        CHECK(mid.objective >= *expected - 1e-7);
        CHECK(lp.max_violation(mid.x) <= 1e-7);

        const LpBasis moved = lp.remap_basis(snapshot, map);
        if (moved.rows > 0) CHECK(moved.rows == lp.num_rows());

        std::vector<int> rest;
        for (int r = base; r < lp.num_rows(); ++r) rest.push_back(r);
        lp.remove_rows(rest);
        auto back = lp.solve(moved);
        REQUIRE(back.status == LpStatus::optimal);
        CHECK(back.objective == doctest::Approx(*expected).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("removing a row with a basic slack keeps the basis") {
    LpProblem lp = example_two();
    lp.add_row({{0, 1.0}}, RowSense::less_equal, 5.0);
    auto before = lp.solve();
    REQUIRE(before.status == LpStatus::optimal);
    const std::vector<int> drop{1};
    lp.remove_rows(drop);
    auto after = lp.solve();
    CHECK(after.status == LpStatus::optimal);
    CHECK(after.iterations == 0);
    CHECK(after.objective == doctest::Approx(before.objective));
}
