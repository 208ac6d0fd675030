#include "salb/hybrid.hpp"

#include <cmath>

namespace salb {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int add_cut_row(IpModel& model, const Cut& cut) {
    std::vector<LpTerm> terms;
    for (const auto& t : cut.terms) {
        if (t.station < 1 || t.station > model.m) continue;
        const int c = model.column(t.station, t.task);
        if (c >= 0) terms.push_back({c, static_cast<double>(t.coef)});
    }
    if (terms.empty()) return -1;
    return model.lp.add_row(terms, RowSense::less_equal, static_cast<double>(cut.rhs));
}

CutLoopStats run_cut_loop(IpModel& model, const Instance& reduced, const Precedence& prec, CutPool& pool,
                          LpSolution& sol, const CutLoopSettings& settings) {
    CutLoopStats stats;
    if (settings.mode == CutMode::none) return stats;
    while (sol.status == LpStatus::optimal && stats.rounds < settings.max_rounds && stats.added < settings.per_node) {
        const Point x = station_task_matrix(model, sol.x);
        auto cuts = separate_all(reduced, prec, x, settings.mode, settings.violation_tol, settings.lift,
                                 settings.observer);
        int this_round = 0;
        for (const auto& c : cuts) {
            if (this_round >= settings.per_round || stats.added >= settings.per_node) break;
            if (!pool.insert(c)) continue;
            if (add_cut_row(model, c) < 0) continue;
            ++this_round;
            ++stats.added;
        }
        if (this_round == 0) break;
        ++stats.rounds;
        sol = model.lp.solve();
    }
    return stats;
}

int ActiveCuts::restore(IpModel& model, const std::vector<double>& x, double tol, int max_rows) {
    int added = 0;
    for (std::size_t k = 0; k < parked_.size() && added < max_rows;) {
        double lhs = 0.0;
        for (const auto& t : parked_[k].terms) lhs += t.coef * x[static_cast<std::size_t>(t.col)];
        if (lhs > parked_[k].rhs + tol) {
            model.lp.add_row(parked_[k].terms, RowSense::less_equal, parked_[k].rhs);
            parked_[k] = std::move(parked_.back());
            parked_.pop_back();
            ++added;
        } else {
            ++k;
        }
    }
    return added;
}

std::vector<int> ActiveCuts::park(IpModel& model, const std::vector<double>& x, double tol) {
    const int rows = model.lp.num_rows();
    if (rows - first_ <= limit_) return {};
    std::vector<int> drop;
    for (int r = first_; r < rows; ++r) {
        double lhs = 0.0;
        for (const auto& t : model.lp.row(r)) lhs += t.coef * x[static_cast<std::size_t>(t.col)];
        if (lhs < model.lp.row_rhs(r) - tol) drop.push_back(r);
    }
    if (drop.empty()) return {};
    for (int r : drop) {
        const auto terms = model.lp.row(r);
        parked_.push_back({std::vector<LpTerm>(terms.begin(), terms.end()), model.lp.row_rhs(r)});
    }
    return model.lp.remove_rows(drop);
}

long domain_size(const DomainStore& store, int n) { return store.total_size(n); }

ReductionResult reduce_problem(const Instance& inst, const ReductionOptions& options) {
    ReductionResult result;
    auto& rep = result.report;
    for (const auto& s : inst.eligible) rep.initial_size += static_cast<long>(s.size());

    auto finish_store = [&](const DomainStore& cp_store) {
        result.domains = DomainStore(inst.n, inst.m);
        for (int j = 0; j < inst.n; ++j)
            for (int i = 1; i <= inst.m; ++i)
                if (cp_store.contains(j, i)) result.domains.insert(j, i);
    };

    // Step 1: CP propagation only.
    auto t0 = std::chrono::steady_clock::now();
    const CpModel cp = build_cp(inst, options.seed);
    DomainStore store = cp.initial;
    const bool cp_ok = propagate(cp, store, options.on_prune);
    rep.cp_ms = ms_since(t0);
    if (!cp_ok) {
        result.feasible = false;
        result.failed_stage = "cp";
        rep.after_cp = rep.after_lp = 0;
        finish_store(cp.initial);
        return result;
    }
    rep.after_cp = store.total_size(inst.n);

    // Step 2: LP bounds on each task's station index.
    t0 = std::chrono::steady_clock::now();
    DomainStore ip_domains(inst.n, inst.m);
    for (int j = 0; j < inst.n; ++j)
        for (int i : store.values(j)) ip_domains.insert(j, i);
    auto model = build_ip(inst, ip_domains);
    std::vector<std::vector<int>> reduced_eligible(static_cast<std::size_t>(inst.n));
    for (int j = 0; j < inst.n; ++j) reduced_eligible[static_cast<std::size_t>(j)] = store.values(j);
    const Instance reduced = with_eligible(inst, reduced_eligible);
    const Precedence prec(reduced);

    // Fixes LP columns whose value left the CP domain.
    auto sync_bounds = [&]() {
        for (int c = 0; c < model->num_cols(); ++c)
            if (!store.contains(model->col_task[static_cast<std::size_t>(c)], model->col_station[static_cast<std::size_t>(c)]))
                model->lp.set_bounds(c, 0.0, 0.0);
    };

    ActiveCuts active(model->lp.num_rows(), model->num_cols());
    bool infeasible = false;
    for (int pass = 0; pass < options.max_passes && !infeasible; ++pass) {
        ++rep.passes;
        bool changed = false;
        for (int j = 0; j < inst.n && !infeasible; ++j) {
            if (store.fixed(j)) continue;
            double bound[2] = {0.0, 0.0};
            bool have[2] = {false, false};
            for (int dir = 0; dir < 2; ++dir) {
                auto obj = task_index_objective(*model, j, dir == 0 ? ObjSense::minimize : ObjSense::maximize);
                model->lp.set_objective(obj.terms, obj.sense);
                LpSolution sol;
                try {
                    sol = model->lp.solve();
                    ++rep.lp_solves;
                    if (sol.status == LpStatus::optimal)
                        rep.cuts_added += run_cut_loop(*model, reduced, prec, result.pool, sol, options.cuts).added;
                    for (int round = 0; sol.status == LpStatus::optimal && round < options.cuts.max_rounds; ++round) {
                        if (active.restore(*model, sol.x, options.cuts.violation_tol, options.cuts.per_round) == 0) break;
                        sol = model->lp.solve();
                        ++rep.lp_solves;
                    }
                    if (sol.status == LpStatus::optimal) active.park(*model, sol.x);
                } catch (const LpNumericalError&) {
                    continue;  // no bound from this solve
                }
                if (sol.status == LpStatus::infeasible) {
                    infeasible = true;
                    break;
                }
                if (sol.status != LpStatus::optimal) continue;
                bound[dir] = sol.objective;
                have[dir] = true;
            }
            if (infeasible) break;
            // Station indices are integral, so the LP bounds round inward.
            const int lo = have[0] ? static_cast<int>(std::ceil(bound[0] - 1e-6)) : 1;
            const int hi = have[1] ? static_cast<int>(std::floor(bound[1] + 1e-6)) : inst.m;
            bool removed = false;
            for (int i : store.values(j))
                if (i < lo || i > hi) removed = store.remove(j, i) || removed;
            if (!removed) continue;
            changed = true;
            if (!propagate(cp, store, options.on_prune)) {
                infeasible = true;
                break;
            }
            sync_bounds();
        }
        if (!changed) break;
    }
    rep.lp_ms = ms_since(t0);
    if (infeasible) {
        result.feasible = false;
        result.failed_stage = "lp";
        finish_store(store);
        rep.after_lp = 0;
        return result;
    }
    finish_store(store);
    rep.after_lp = result.domains.total_size(inst.n);
    for (int j = 0; j < inst.n; ++j)
        if (result.domains.fixed(j)) ++rep.fixed_tasks;
    return result;
}

NodeBounds root_bounds(const IpModel& model) {
    NodeBounds b;
    b.lower.assign(static_cast<std::size_t>(model.num_cols()), 0.0);
    b.upper.assign(static_cast<std::size_t>(model.num_cols()), 1.0);
    return b;
}

bool node_propagate(const IpModel& model, const CpModel& cp, NodeBounds& bounds) {
    DomainStore store(cp.n_bar, cp.m);
    for (int c = 0; c < model.num_cols(); ++c) {
        if (bounds.upper[static_cast<std::size_t>(c)] < 0.5) continue;
        store.insert(model.col_task[static_cast<std::size_t>(c)], model.col_station[static_cast<std::size_t>(c)]);
    }
    for (int i = 1; i <= cp.m; ++i) store.insert(cp.artificial(i), i);
    for (int j = 0; j < cp.n; ++j)
        if (store.size(j) == 0) return false;
    for (int c = 0; c < model.num_cols(); ++c)
        if (bounds.lower[static_cast<std::size_t>(c)] > 0.5) {
            const int j = model.col_task[static_cast<std::size_t>(c)];
            const int i = model.col_station[static_cast<std::size_t>(c)];
            if (!store.contains(j, i)) return false;
            store.assign(j, i);
        }
    if (!propagate(cp, store)) return false;
    for (int c = 0; c < model.num_cols(); ++c)
        if (!store.contains(model.col_task[static_cast<std::size_t>(c)], model.col_station[static_cast<std::size_t>(c)]))
            bounds.upper[static_cast<std::size_t>(c)] = 0.0;
    return true;
}

std::optional<Assignment> round_solution(const Instance& inst, const IpModel& model, const std::vector<double>& x,
                                         const LabelBudget& budget) {
    DomainStore support(inst.n, inst.m);
    for (int c = 0; c < model.num_cols(); ++c)
        if (x[static_cast<std::size_t>(c)] > 1e-6)
            support.insert(model.col_task[static_cast<std::size_t>(c)], model.col_station[static_cast<std::size_t>(c)]);
    for (int j = 0; j < inst.n; ++j)
        if (support.size(j) == 0) return std::nullopt;
    const CpModel cp = build_cp(inst, &support);
    auto r = label(cp, cp.initial, budget);
    if (r.status != LabelStatus::found || !check_assignment(inst, r.assignment).empty()) return std::nullopt;
    return r.assignment;
}

}  // namespace salb
