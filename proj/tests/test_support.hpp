// Shared helpers for the unit suites: instance builders and exhaustive
// enumeration oracles that never touch the solver code paths.
#ifndef SALB_TESTS_TEST_SUPPORT_HPP
#define SALB_TESTS_TEST_SUPPORT_HPP

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "salb/instance.hpp"

namespace salb::testing {

/// Uniform-capacity instance with every station eligible. Edges are 1-based.
inline Instance make_instance(std::vector<int> times, int ct, int m, std::vector<std::pair<int, int>> edges = {}) {
    Instance inst;
    inst.n = static_cast<int>(times.size());
    inst.m = m;
    inst.task_time = std::move(times);
    inst.capacity.assign(static_cast<std::size_t>(m), ct);
    std::vector<int> all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), 1);
    inst.eligible.assign(static_cast<std::size_t>(inst.n), all);
    for (auto [a, b] : edges) inst.edges.push_back({a - 1, b - 1});
    return inst;
}

inline Instance chain3() { return make_instance({4, 4, 4}, 5, 3, {{1, 2}, {2, 3}}); }

/// Random instance with edges j1 < j2 drawn with the given probability.
inline Instance random_instance(std::mt19937& rng, int n, int m, double density, int tmax, int ct) {
    std::vector<int> times;
    std::uniform_int_distribution<int> t(1, tmax);
    for (int j = 0; j < n; ++j) times.push_back(std::min(t(rng), ct));
    std::vector<std::pair<int, int>> edges;
    std::bernoulli_distribution coin(density);
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            if (coin(rng)) edges.emplace_back(a, b);
    return make_instance(times, ct, m, edges);
}

/// Calls f for every full assignment satisfying eligibility, capacity and
/// precedence. Plain task-by-task enumeration.
inline void for_each_feasible(const Instance& inst, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> station(static_cast<std::size_t>(inst.n), 0);
    std::vector<long> load(static_cast<std::size_t>(inst.m) + 1, 0);
    std::vector<std::vector<std::pair<int, bool>>> touching(static_cast<std::size_t>(inst.n));
    for (const auto& e : inst.edges) {
        int later = std::max(e.from, e.to);
        touching[static_cast<std::size_t>(later)].push_back({e.from == later ? e.to : e.from, e.from == later});
    }
    std::function<void(int)> rec = [&](int j) {
        if (j == inst.n) {
            f(station);
            return;
        }
        for (int i : inst.eligible[static_cast<std::size_t>(j)]) {
            const int t = inst.task_time[static_cast<std::size_t>(j)];
            if (load[static_cast<std::size_t>(i)] + t > inst.cap(i)) continue;
            bool ok = true;
            for (auto [other, j_is_pred] : touching[static_cast<std::size_t>(j)]) {
                int so = station[static_cast<std::size_t>(other)];
                if (j_is_pred ? i > so : so > i) ok = false;
            }
            if (!ok) continue;
            station[static_cast<std::size_t>(j)] = i;
            load[static_cast<std::size_t>(i)] += t;
            rec(j + 1);
            load[static_cast<std::size_t>(i)] -= t;
        }
        station[static_cast<std::size_t>(j)] = 0;
    };
    rec(0);
}

/// Pairs (station, task) used by at least one feasible assignment.
inline std::set<std::pair<int, int>> feasible_pairs(const Instance& inst) {
    std::set<std::pair<int, int>> used;
    for_each_feasible(inst, [&](const std::vector<int>& s) {
        for (int j = 0; j < inst.n; ++j) used.insert({s[static_cast<std::size_t>(j)], j});
    });
    return used;
}

/// Points of the multiple-knapsack relaxation: each task on one eligible
/// station or on none (station 0), capacities respected, precedence ignored.
inline void for_each_mk_point(const Instance& inst, const std::function<void(const Assignment&)>& f) {
    Assignment a;
    a.station_of.assign(static_cast<std::size_t>(inst.n), 0);
    std::vector<long> load(static_cast<std::size_t>(inst.m) + 1, 0);
    std::function<void(int)> rec = [&](int j) {
        if (j == inst.n) {
            f(a);
            return;
        }
        rec(j + 1);
        const int t = inst.task_time[static_cast<std::size_t>(j)];
        for (int i : inst.eligible[static_cast<std::size_t>(j)]) {
            if (load[static_cast<std::size_t>(i)] + t > inst.cap(i)) continue;
            load[static_cast<std::size_t>(i)] += t;
            a.station_of[static_cast<std::size_t>(j)] = i;
            rec(j + 1);
            a.station_of[static_cast<std::size_t>(j)] = 0;
            load[static_cast<std::size_t>(i)] -= t;
        }
    };
    rec(0);
}

/// Minimum highest station over all feasible assignments, 0 when none.
inline int brute_force_optimum(const Instance& inst) {
    int best = 0;
    for_each_feasible(inst, [&](const std::vector<int>& s) {
        int h = *std::max_element(s.begin(), s.end());
        if (best == 0 || h < best) best = h;
    });
    return best;
}

}  // namespace salb::testing

#endif  // SALB_TESTS_TEST_SUPPORT_HPP
