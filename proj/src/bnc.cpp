#include "salb/bnc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace salb {

namespace {

using Clock = std::chrono::steady_clock;
using boost::multiprecision::cpp_int;

struct Limits {
    std::optional<Clock::time_point> deadline;
    long node_limit = 0;

    bool expired() const { return deadline && Clock::now() >= *deadline; }
    std::chrono::milliseconds remaining() const {
        if (!deadline) return std::chrono::milliseconds(0);
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now());
        return std::max(left, std::chrono::milliseconds(1));
    }
};

CutLoopSettings loop_settings(const SolverConfig& cfg) {
    CutLoopSettings s;
    s.mode = cfg.cut_mode;
    s.max_rounds = cfg.max_rounds;
    s.per_round = cfg.cuts_per_round;
    s.per_node = cfg.cuts_per_node;
    s.violation_tol = cfg.violation_tol;
    s.lift = cfg.lift_cuts;
    s.observer = cfg.on_cut;
    return s;
}

void log(const SolverConfig& cfg, const std::string& msg) {
    if (cfg.log) cfg.log(msg);
}

cpp_int objective_of(const Assignment& a, ObjectiveMode mode, const CostScheme& c) {
    if (mode == ObjectiveMode::station_cost) return cost_of(c, a);
    cpp_int total = 0;
    for (int s : a.station_of) total += s;
    return total;
}

std::vector<std::vector<int>> domain_lists(const DomainStore& d, int n) {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = d.values(j);
    return out;
}

FixedMResult solve_impl(const Instance& inst, int m, const SolverConfig& cfg, SolveGoal goal, const Limits& limits) {
    if (cfg.on_solve_start) cfg.on_solve_start(m);
    FixedMResult res;
    Instance im = restrict_stations(inst, m);
    for (const auto& s : im.eligible)
        if (s.empty()) {
            res.status = SolveStatus::infeasible;
            return res;
        }

    DomainStore domains;
    CutPool pool;
    if (cfg.reduce) {
        ReductionOptions ro;
        ro.cuts = loop_settings(cfg);
        ro.max_passes = cfg.reduction_passes;
        ro.on_prune = cfg.on_prune;
        auto red = reduce_problem(im, ro);
        res.reduced = true;
        res.reduction = red.report;
        res.cuts += red.report.cuts_added;
        if (!red.feasible) {
            res.status = SolveStatus::infeasible;
            return res;
        }
        domains = std::move(red.domains);
        pool = std::move(red.pool);
    } else {
        domains = DomainStore::from_instance(im);
    }
    const Instance reduced = with_eligible(im, domain_lists(domains, im.n));

    if (cfg.engine == Engine::labeling) {
        const CpModel cp = build_cp(reduced);
        LabelBudget budget{cfg.node_limit, limits.remaining()};
        auto r = label(cp, cp.initial, budget);
        res.nodes = r.nodes;
        if (r.status == LabelStatus::found) {
            res.status = SolveStatus::optimal;
            res.assignment = r.assignment;
        } else {
            res.status = r.status == LabelStatus::infeasible ? SolveStatus::infeasible : SolveStatus::limit;
        }
        return res;
    }

    auto model_opt = build_ip(reduced, domains);
    if (!model_opt) {
        res.status = SolveStatus::infeasible;
        return res;
    }
    IpModel& model = *model_opt;
    const CostScheme costs = station_cost_vector(im.n, m);
    if (cfg.objective == ObjectiveMode::station_cost) {
        if (!cost_scheme_fits_double(costs)) throw std::invalid_argument("cost scheme exceeds double precision");
        auto obj = station_cost_objective(model, costs);
        model.lp.set_objective(obj.terms, obj.sense);
    } else {
        auto obj = station_index_objective(model);
        model.lp.set_objective(obj.terms, obj.sense);
    }
    ActiveCuts active(model.lp.num_rows(), model.num_cols());
    for (const auto& c : pool.cuts()) add_cut_row(model, c);

    const Precedence prec(reduced);
    const CpModel cp = build_cp(reduced);
    CutLoopSettings loop = loop_settings(cfg);

    std::optional<Assignment> incumbent;
    cpp_int inc_value = 0;
    double inc_double = 0.0;
    // Objectives are integral: a node can only improve if its bound is at
    // most inc - 1. The half-unit margin absorbs LP round-off.
    auto prunable = [&](double bound) { return incumbent && bound > inc_double - 0.5; };
    auto offer = [&](const Assignment& a) {
        if (!check_assignment(im, a).empty()) return false;
        cpp_int v = objective_of(a, cfg.objective, costs);
        if (incumbent && v >= inc_value) return false;
        incumbent = a;
        inc_value = v;
        inc_double = static_cast<double>(v);
        return true;
    };

    std::vector<SearchNode> open;
    open.push_back({root_bounds(model), LpBasis{}, 0, -1e300});
    bool aborted = false;
    bool trouble = false;

    while (!open.empty()) {
        if (limits.expired() || (limits.node_limit > 0 && res.nodes >= limits.node_limit)) {
            aborted = true;
            break;
        }
        // Depth first until an incumbent exists, then best bound.
        std::size_t pick = open.size() - 1;
        if (incumbent) {
            for (std::size_t k = 0; k < open.size(); ++k)
                if (open[k].bound < open[pick].bound) pick = k;
        }
        SearchNode node = std::move(open[pick]);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
        if (prunable(node.bound)) continue;
        ++res.nodes;

        if (cfg.node_propagation && !node_propagate(model, cp, node.bounds)) continue;
        for (int c = 0; c < model.num_cols(); ++c)
            model.lp.set_bounds(c, node.bounds.lower[static_cast<std::size_t>(c)],
                                node.bounds.upper[static_cast<std::size_t>(c)]);

        LpSolution sol;
        try {
            sol = node.depth == 0 ? model.lp.solve() : model.lp.solve(node.basis);
            const bool cuts_here =
                cfg.cut_mode != CutMode::none && (cfg.placement == CutPlacement::every_node || node.depth == 0);
            if (sol.status == LpStatus::optimal && cuts_here)
                res.cuts += run_cut_loop(model, reduced, prec, pool, sol, loop).added;
            for (int round = 0; sol.status == LpStatus::optimal && round < cfg.max_rounds; ++round) {
                if (active.restore(model, sol.x, cfg.violation_tol, cfg.cuts_per_round) == 0) break;
                sol = model.lp.solve();
            }
        } catch (const LpNumericalError&) {
            try {
                sol = model.lp.solve(LpBasis{});
            } catch (const LpNumericalError&) {
                trouble = true;
                continue;
            }
        }
        if (sol.status == LpStatus::infeasible) continue;
        if (sol.status != LpStatus::optimal) {
            trouble = true;
            continue;
        }
        const double bound = std::max(node.bound, sol.objective);
        res.bound_trail.emplace_back(node.bound, sol.objective);
        if (prunable(bound)) continue;

        const auto branch = select_branch(model, reduced, sol.x, cfg.integrality_tol);
        if (!branch) {
            auto a = assignment_of(model, sol.x, cfg.integrality_tol);
            if (a && offer(*a) && goal == SolveGoal::feasibility) break;
            if (a) continue;
            trouble = true;
            continue;
        }
        if (cfg.rounding) {
            auto a = round_solution(reduced, model, sol.x, cfg.rounding_budget);
            if (a && offer(*a) && goal == SolveGoal::feasibility) break;
            if (prunable(bound)) continue;
        }
        const auto row_map = active.park(model, sol.x);
        if (!row_map.empty())
            for (auto& n : open) n.basis = model.lp.remap_basis(n.basis, row_map);
        const LpBasis basis = model.lp.basis();
        SearchNode down{node.bounds, basis, node.depth + 1, bound};
        down.bounds.upper[static_cast<std::size_t>(branch->column)] = 0.0;
        SearchNode up{std::move(node.bounds), basis, node.depth + 1, bound};
        up.bounds.lower[static_cast<std::size_t>(branch->column)] = 1.0;
        open.push_back(std::move(down));
        open.push_back(std::move(up));
    }

    res.assignment = incumbent;
    if (goal == SolveGoal::feasibility && incumbent) {
        res.status = SolveStatus::optimal;
    } else if (aborted || trouble) {
        res.status = incumbent ? SolveStatus::feasible : SolveStatus::limit;
        double lb = incumbent ? inc_double : 1e300;
        for (const auto& n : open) lb = std::min(lb, n.bound);
        res.best_bound = lb;
    } else {
        res.status = incumbent ? SolveStatus::optimal : SolveStatus::infeasible;
        res.best_bound = incumbent ? inc_double : 0.0;
    }
    return res;
}

Limits limits_from(const SolverConfig& cfg, Clock::time_point start) {
    Limits l;
    if (cfg.time_limit.count() > 0) l.deadline = start + cfg.time_limit;
    l.node_limit = cfg.node_limit;
    return l;
}

}  // namespace

void validate_config(const SolverConfig& cfg) {
    if (cfg.max_rounds < 0 || cfg.cuts_per_round < 0 || cfg.cuts_per_node < 0 || cfg.reduction_passes < 0)
        throw std::invalid_argument("cut caps must be >= 0");
    if (!(cfg.integrality_tol > 0.0) || !(cfg.violation_tol > 0.0))
        throw std::invalid_argument("tolerances must be positive");
}

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::limit: return "limit";
    }
    return "?";
}

FixedMResult solve_fixed_m(const Instance& inst, int m, const SolverConfig& cfg, SolveGoal goal) {
    validate_config(cfg);
    if (m < 1 || m > inst.m) throw std::invalid_argument("station count out of range");
    return solve_impl(inst, m, cfg, goal, limits_from(cfg, Clock::now()));
}

StationsResult minimize_stations(const Instance& inst, const SolverConfig& cfg) {
    validate_config(cfg);
    const auto start = Clock::now();
    const Limits limits = limits_from(cfg, start);
    StationsResult out;
    auto& rep = out.report;
    auto finish = [&]() {
        rep.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
        if (!rep.assignment.station_of.empty()) rep.stations_used = rep.assignment.highest_station();
        rep.proven_optimal = out.status == SolveStatus::optimal;
        return out;
    };
    auto account = [&](const FixedMResult& r) {
        rep.node_count += r.nodes;
        rep.cut_count += r.cuts;
    };

    const int lb = station_lower_bound(inst);
    std::optional<Assignment> best = first_fit(inst);
    if (best) log(cfg, "first fit: " + std::to_string(best->highest_station()) + " stations");

    if (cfg.objective == ObjectiveMode::station_cost && cfg.engine == Engine::branch_and_cut) {
        const int m_hi = best ? best->highest_station() : inst.m;
        auto r = solve_impl(inst, m_hi, cfg, SolveGoal::optimize, limits);
        account(r);
        if (r.assignment) rep.assignment = *r.assignment;
        else if (best) rep.assignment = *best;
        if (r.status == SolveStatus::optimal || r.status == SolveStatus::infeasible) out.status = r.status;
        else out.status = rep.assignment.station_of.empty() ? SolveStatus::limit : SolveStatus::feasible;
        return finish();
    }

    if (!best) {
        auto r = solve_impl(inst, inst.m, cfg, SolveGoal::feasibility, limits);
        account(r);
        log(cfg, "m=" + std::to_string(inst.m) + " " + solve_status_name(r.status));
        if (!r.assignment) {
            out.status = r.status == SolveStatus::infeasible ? SolveStatus::infeasible : SolveStatus::limit;
            return finish();
        }
        best = r.assignment;
    }
    out.status = SolveStatus::optimal;
    while (best->highest_station() > lb) {
        const int m = best->highest_station() - 1;
        auto r = solve_impl(inst, m, cfg, SolveGoal::feasibility, limits);
        account(r);
        log(cfg, "m=" + std::to_string(m) + " " + solve_status_name(r.status) + " nodes=" + std::to_string(r.nodes));
        if (r.assignment) {
            best = r.assignment;
            continue;
        }
        if (r.status != SolveStatus::infeasible) out.status = SolveStatus::feasible;
        break;
    }
    rep.assignment = *best;
    return finish();
}

std::optional<BranchDecision> select_branch(const IpModel& model, const Instance& inst, const std::vector<double>& x,
                                            double tol) {
    std::optional<BranchDecision> best;
    double best_dist = 0.0;
    for (int c = 0; c < model.num_cols(); ++c) {
        const double v = x[static_cast<std::size_t>(c)];
        if (v <= tol || v >= 1.0 - tol) continue;
        const double dist = std::abs(v - 0.5);
        const int j = model.col_task[static_cast<std::size_t>(c)];
        const int i = model.col_station[static_cast<std::size_t>(c)];
        bool better = !best;
        if (!better && dist < best_dist - 1e-12) better = true;
        else if (!better && dist <= best_dist + 1e-12) {
            const int tj = inst.task_time[static_cast<std::size_t>(j)];
            const int tb = inst.task_time[static_cast<std::size_t>(best->task)];
            better = std::tuple(-tj, i, j) < std::tuple(-tb, best->station, best->task);
        }
        if (better) {
            best = BranchDecision{c, i, j};
            best_dist = dist;
        }
    }
    return best;
}

void write_solution(std::ostream& out, const OptimumReport& report) {
    for (std::size_t j = 0; j < report.assignment.station_of.size(); ++j)
        out << (j + 1) << ' ' << report.assignment.station_of[j] << '\n';
    out << "stations=" << report.stations_used << " nodes=" << report.node_count << " cuts=" << report.cut_count
        << " time_ms=" << report.elapsed.count() << '\n';
}

}  // namespace salb
