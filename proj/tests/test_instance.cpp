#include <random>

#include "doctest.h"
#include "salb/instance.hpp"
#include "test_support.hpp"

using namespace salb;
using salb::testing::make_instance;

namespace {

const char* kChainNative =
    "# three tasks in a chain\n"
    "3 3\n"
    "5 5 5\n"
    "4 *\n"
    "4 *\n"
    "4 *\n"
    "2\n"
    "1 2\n"
    "2 3\n";

}  // namespace

TEST_CASE("parse native chain") {
    auto inst = parse_instance(kChainNative, InstanceFormat::native);
    CHECK(inst.n == 3);
    CHECK(inst.m == 3);
    CHECK(inst.task_time == std::vector<int>{4, 4, 4});
    CHECK(inst.capacity == std::vector<int>{5, 5, 5});
    CHECK(inst.eligible[1] == std::vector<int>{1, 2, 3});
    REQUIRE(inst.edges.size() == 2);
    CHECK(inst.edges[0] == Edge{0, 1});
    CHECK(inst.edges[1] == Edge{1, 2});
    CHECK(inst == testing::chain3());
}

TEST_CASE("parse precedence list with cycle-time override") {
    const char* text = "3\n4\n4\n4\n1,2\n2,3\n-1,-1\n";
    auto inst = parse_instance(text, InstanceFormat::precedence_list, {.cycle_time = 5, .stations = std::nullopt});
    CHECK(inst == testing::chain3());

    SUBCASE("station override") {
        auto wide = parse_instance(text, InstanceFormat::precedence_list, {.cycle_time = 5, .stations = 4});
        CHECK(wide.m == 4);
        CHECK(wide.eligible[0] == std::vector<int>{1, 2, 3, 4});
    }
    SUBCASE("missing cycle time") {
        CHECK_THROWS_AS(parse_instance(text, InstanceFormat::precedence_list), InstanceError);
    }
    SUBCASE("missing terminator") {
        CHECK_THROWS_AS(parse_instance("2\n1\n1\n1,2\n", InstanceFormat::precedence_list, {.cycle_time = 5}),
                        ParseError);
    }
}

TEST_CASE("parse errors") {
    SUBCASE("cycle") {
        std::string text = "3 3\n5 5 5\n4 *\n4 *\n4 *\n3\n1 2\n2 3\n3 1\n";
        CHECK_THROWS_WITH_AS(parse_instance(text, InstanceFormat::native), doctest::Contains("cycle"), InstanceError);
    }
    SUBCASE("syntax error carries the line number") {
        std::string text = "3 3\n5 5 5\n4 *\nfour *\n4 *\n0\n";
        try {
            parse_instance(text, InstanceFormat::native);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
    SUBCASE("task exceeding every capacity") {
        std::string text = "1 2\n5 5\n6 *\n0\n";
        CHECK_THROWS_WITH_AS(parse_instance(text, InstanceFormat::native), doctest::Contains("fits no station"),
                             InstanceError);
    }
    SUBCASE("truncated file") {
        CHECK_THROWS_AS(parse_instance("2 1\n5\n1 *\n", InstanceFormat::native), ParseError);
    }
}

TEST_CASE("validate") {
    CHECK(validate(testing::chain3()).empty());

    auto big = make_instance({6, 1}, 5, 2);
    auto v = validate(big);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "task 1 fits no station");

    auto empty = testing::chain3();
    empty.eligible[1].clear();
    v = validate(empty);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("empty eligible set") != std::string::npos);
}

TEST_CASE("first fit") {
    CHECK(first_fit_upper_bound(testing::chain3()) == 3);
    CHECK(first_fit_upper_bound(make_instance({3, 3, 3}, 9, 3)) == 1);
    CHECK(first_fit_upper_bound(make_instance({1}, 5, 1)) == 1);
}

TEST_CASE("oracle optimum examples") {
    auto r = oracle_optimum(testing::chain3());
    REQUIRE(r.status == OracleStatus::optimal);
    CHECK(r.report.stations_used == 3);

    r = oracle_optimum(make_instance({3, 3, 3}, 9, 3));
    REQUIRE(r.status == OracleStatus::optimal);
    CHECK(r.report.stations_used == 1);

    r = oracle_optimum(make_instance({4, 4}, 5, 1, {{1, 2}}));
    CHECK(r.status == OracleStatus::infeasible);

    r = oracle_optimum(make_instance({4, 4, 4, 4}, 5, 4), 3);
    CHECK(r.status == OracleStatus::budget_exceeded);
}

TEST_CASE("oracle needs no station symmetry") {
    // Task 1 comes first in every topological order but must sit on station 2:
    // {2,3} | {1,4} | {5,6} is the only way to use three stations.
    auto inst = make_instance({5, 6, 4, 5, 5, 5}, 10, 4, {{2, 4}, {1, 5}, {4, 6}});
    auto r = oracle_optimum(inst);
    REQUIRE(r.status == OracleStatus::optimal);
    CHECK(r.report.stations_used == 3);
    CHECK(testing::brute_force_optimum(inst) == 3);
}

TEST_CASE("properties on random instances") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 120; ++trial) {
        int n = 1 + static_cast<int>(rng() % 8);
        int ct = 9 + static_cast<int>(rng() % 10);
        auto base = testing::random_instance(rng, n, 1, 0.25, 9, ct);
        int ff = first_fit_upper_bound(base);
        auto inst = make_instance(base.task_time, ct, ff, {});
        inst.edges = base.edges;
        CAPTURE(trial);

        // first fit is feasible and respects the trivial bound
        auto a = first_fit_assignment(inst, ct);
        CHECK(check_assignment(inst, a).empty());
        CHECK(ff >= station_lower_bound(inst));
        CHECK(ff <= n);

        // round trip through the native format
        CHECK(parse_instance(serialize_native(inst), InstanceFormat::native) == inst);

        // oracle agrees with plain enumeration and never exceeds first fit
        auto r = oracle_optimum(inst);
        REQUIRE(r.status == OracleStatus::optimal);
        CHECK(r.report.stations_used <= ff);
        CHECK(r.report.stations_used == testing::brute_force_optimum(inst));
        CHECK(check_assignment(inst, r.report.assignment).empty());
    }
}

TEST_CASE("properties with precedence and restricted eligibility") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 120; ++trial) {
        int n = 2 + static_cast<int>(rng() % 7);
        int ct = 8 + static_cast<int>(rng() % 8);
        auto inst = testing::random_instance(rng, n, 1, 0.3, 8, ct);
        int ff = first_fit_upper_bound(inst);
        inst = testing::make_instance(inst.task_time, ct, std::min(ff + 1, 5), {});
        inst.edges = testing::random_instance(rng, n, 1, 0.3, 8, ct).edges;
        // drop a random station from some eligible sets
        for (auto& s : inst.eligible)
            if (s.size() > 1 && rng() % 4 == 0) s.erase(s.begin() + static_cast<long>(rng() % s.size()));
        CAPTURE(trial);
        CHECK(parse_instance(serialize_native(inst), InstanceFormat::native) == inst);
        auto r = oracle_optimum(inst);
        int brute = testing::brute_force_optimum(inst);
        if (brute == 0) {
            CHECK(r.status == OracleStatus::infeasible);
        } else {
            REQUIRE(r.status == OracleStatus::optimal);
            CHECK(r.report.stations_used == brute);
            CHECK(check_assignment(inst, r.report.assignment).empty());
        }
    }
}
