#include <random>
#include <sstream>

#include "doctest.h"
#include "salb/bnc.hpp"
#include "test_support.hpp"

using namespace salb;
using salb::testing::make_instance;

namespace {

SolverConfig plain_ip() {
    SolverConfig cfg;
    cfg.cut_mode = CutMode::none;
    cfg.reduce = false;
    cfg.node_propagation = false;
    cfg.rounding = false;
    return cfg;
}

}  // namespace

TEST_CASE("fixed m on the chain") {
    const auto inst = testing::chain3();
    for (const SolverConfig& cfg : {SolverConfig{}, plain_ip()}) {
        auto r = solve_fixed_m(inst, 3, cfg);
        REQUIRE(r.status == SolveStatus::optimal);
        REQUIRE(r.assignment);
        CHECK(r.assignment->station_of == std::vector<int>{1, 2, 3});
        CHECK(solve_fixed_m(inst, 2, cfg).status == SolveStatus::infeasible);
    }
}

TEST_CASE("integral root needs one node") {
    const auto inst = make_instance({3, 3, 3}, 9, 1);
    for (const SolverConfig& cfg : {SolverConfig{}, plain_ip()}) {
        auto r = solve_fixed_m(inst, 1, cfg);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.nodes == 1);
        CHECK(r.assignment->station_of == std::vector<int>{1, 1, 1});
    }
}

TEST_CASE("minimize stations examples") {
    auto r = minimize_stations(testing::chain3());
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.report.stations_used == 3);
    CHECK(r.report.proven_optimal);

    r = minimize_stations(make_instance({3, 3, 3}, 9, 3));
    CHECK(r.report.stations_used == 1);
    CHECK(r.report.assignment.station_of == std::vector<int>{1, 1, 1});

    SolverConfig cfg;
    cfg.objective = ObjectiveMode::station_cost;
    r = minimize_stations(testing::chain3(), cfg);
    CHECK(r.report.stations_used == 3);

    // No station can take task 2.
    auto bad = make_instance({4, 7}, 5, 3);
    r = minimize_stations(bad);
    CHECK(r.status == SolveStatus::infeasible);
}

TEST_CASE("select_branch rule") {
    // Five tasks on two stations, all eligible everywhere.
    auto inst = make_instance({1, 2, 3, 4, 5}, 100, 2);
    auto model = build_ip(inst, DomainStore::from_instance(inst));
    REQUIRE(model);
    std::vector<double> x(static_cast<std::size_t>(model->num_cols()), 0.0);

    CHECK_FALSE(select_branch(*model, inst, x));

    x[static_cast<std::size_t>(model->column(2, 4))] = 0.5;
    x[static_cast<std::size_t>(model->column(1, 2))] = 0.9;
    auto b = select_branch(*model, inst, x);
    REQUIRE(b);
    CHECK(b->station == 2);
    CHECK(b->task == 4);
    CHECK(b->column == model->column(2, 4));

    std::fill(x.begin(), x.end(), 0.0);
    x[static_cast<std::size_t>(model->column(1, 0))] = 0.3;
    b = select_branch(*model, inst, x);
    REQUIRE(b);
    CHECK(b->task == 0);

    auto tie = make_instance({3, 7}, 100, 2);
    auto m2 = build_ip(tie, DomainStore::from_instance(tie));
    std::vector<double> y(static_cast<std::size_t>(m2->num_cols()), 0.0);
    y[static_cast<std::size_t>(m2->column(1, 0))] = 0.5;
    y[static_cast<std::size_t>(m2->column(2, 1))] = 0.5;
    b = select_branch(*m2, tie, y);
    REQUIRE(b);
    CHECK(b->task == 1);

    // Same time: lower station wins.
    auto same = make_instance({4, 4}, 100, 2);
    auto m3 = build_ip(same, DomainStore::from_instance(same));
    std::vector<double> z(static_cast<std::size_t>(m3->num_cols()), 0.0);
    z[static_cast<std::size_t>(m3->column(2, 0))] = 0.5;
    z[static_cast<std::size_t>(m3->column(1, 1))] = 0.5;
    b = select_branch(*m3, same, z);
    REQUIRE(b);
    CHECK(b->station == 1);
}

TEST_CASE("solution file format") {
    OptimumReport rep;
    rep.assignment.station_of = {1, 2, 3};
    rep.stations_used = 3;
    rep.node_count = 4;
    rep.cut_count = 2;
    rep.elapsed = std::chrono::milliseconds(17);
    std::ostringstream os;
    write_solution(os, rep);
    CHECK(os.str() == "1 1\n2 2\n3 3\nstations=3 nodes=4 cuts=2 time_ms=17\n");
}

TEST_CASE("config validation") {
    SolverConfig cfg;
    cfg.cuts_per_round = -1;
    CHECK_THROWS_AS(minimize_stations(testing::chain3(), cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.integrality_tol = 0.0;
    CHECK_THROWS_AS(solve_fixed_m(testing::chain3(), 3, cfg), std::invalid_argument);
}

TEST_CASE("exactness against the oracle in every configuration") {
    std::mt19937 rng(4242);
    int tested = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 4 + trial % 5;
        std::uniform_int_distribution<int> ctd(9, 20);
        auto inst = testing::random_instance(rng, n, 5, 0.2, 9, ctd(rng));
        const auto oracle = oracle_optimum(inst);
        if (oracle.status != OracleStatus::optimal) continue;
        ++tested;
        const int opt = oracle.report.stations_used;

        std::vector<SolverConfig> configs;
        for (auto mode : {CutMode::none, CutMode::standard, CutMode::all})
            for (auto obj : {ObjectiveMode::outer_loop, ObjectiveMode::station_cost}) {
                SolverConfig cfg;
                cfg.cut_mode = mode;
                cfg.objective = obj;
                configs.push_back(cfg);
            }
        SolverConfig root_only;
        root_only.placement = CutPlacement::root_only;
        configs.push_back(root_only);
        configs.push_back(plain_ip());
        SolverConfig cp_only;
        cp_only.engine = Engine::labeling;
        configs.push_back(cp_only);

        for (const auto& cfg : configs) {
            CAPTURE(trial);
            CAPTURE(cut_mode_name(cfg.cut_mode));
            CAPTURE(static_cast<int>(cfg.objective));
            auto r = minimize_stations(inst, cfg);
            REQUIRE(r.status == SolveStatus::optimal);
            CHECK(r.report.stations_used == opt);
            CHECK(check_assignment(inst, r.report.assignment).empty());
        }
    }
    CHECK(tested >= 40);
}

TEST_CASE("station cost argmin uses the minimal station count") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        auto inst = testing::random_instance(rng, 3 + trial % 4, 4, 0.3, 9, 12);
        const int opt = testing::brute_force_optimum(inst);
        if (opt == 0) continue;
        // Exact argmin of the cost scheme by enumeration.
        const auto c = station_cost_vector(inst.n, inst.m);
        std::optional<boost::multiprecision::cpp_int> best;
        int best_h = 0;
        testing::for_each_feasible(inst, [&](const std::vector<int>& s) {
            Assignment a{s};
            auto v = cost_of(c, a);
            if (!best || v < *best) {
                best = v;
                best_h = a.highest_station();
            }
        });
        CHECK(best_h == opt);
        SolverConfig cfg;
        cfg.objective = ObjectiveMode::station_cost;
        auto r = solve_fixed_m(inst, inst.m, cfg);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(cost_of(c, *r.assignment) == *best);
        CHECK(r.assignment->highest_station() == opt);
    }
}

TEST_CASE("node bounds never drop below the parent bound") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        auto inst = testing::random_instance(rng, 8, 5, 0.2, 9, 14);
        SolverConfig cfg;
        cfg.rounding = false;
        auto r = solve_fixed_m(inst, inst.m, cfg);
        for (auto [parent, lp] : r.bound_trail) CHECK(lp >= parent - 1e-6 * std::max(1.0, std::abs(parent)));
        if (r.assignment) CHECK(check_assignment(inst, *r.assignment).empty());
    }
}

TEST_CASE("node limit stops the search") {
    std::mt19937 rng(5);
    auto inst = testing::random_instance(rng, 10, 6, 0.1, 9, 13);
    SolverConfig cfg = plain_ip();
    cfg.node_limit = 1;
    auto r = solve_fixed_m(inst, inst.m, cfg);
    CHECK(r.nodes <= 1);
    if (r.status == SolveStatus::feasible || r.status == SolveStatus::optimal) {
        REQUIRE(r.assignment);
        CHECK(check_assignment(inst, *r.assignment).empty());
    }
}
