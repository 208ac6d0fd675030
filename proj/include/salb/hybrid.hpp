#ifndef SALB_HYBRID_HPP
#define SALB_HYBRID_HPP

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "salb/cp.hpp"
#include "salb/cuts.hpp"
#include "salb/instance.hpp"
#include "salb/ip_model.hpp"

namespace salb {

struct CutLoopSettings {
    CutMode mode = CutMode::all;
    int max_rounds = 5;
    int per_round = 20;
    int per_node = 50;
    double violation_tol = 1e-4;
    bool lift = true;
    CutObserver observer;
};

struct CutLoopStats {
    int rounds = 0;
    int added = 0;
};

/// Adds the cut as an LP row; terms on columns absent from the model are
/// dropped (those variables are zero in every feasible point). Returns the
/// row index, or -1 if no term survives.
int add_cut_row(IpModel& model, const Cut& cut);

/// Separate, add and re-solve until no violated cut is found, a cap is hit,
/// or the LP stops being optimal. `sol` must hold an optimal solution of
/// model.lp on entry and holds the final one on return. New cuts also go to
/// `pool`; cuts already in the pool are skipped.
CutLoopStats run_cut_loop(IpModel& model, const Instance& reduced, const Precedence& prec, CutPool& pool,
                          LpSolution& sol, const CutLoopSettings& settings);

/// Keeps the number of cut rows in an LP bounded. Cut rows (all rows from
/// `first_cut_row` on) that are slack at the current point are parked once
/// there are more than `limit` of them, and come back when violated again.
class ActiveCuts {
public:
    ActiveCuts(int first_cut_row, int limit) : first_(first_cut_row), limit_(limit) {}

    /// Re-adds up to max_rows parked rows violated by more than tol at x.
    int restore(IpModel& model, const std::vector<double>& x, double tol, int max_rows);
    /// Returns the row map of LpProblem::remove_rows, empty if nothing moved.
    std::vector<int> park(IpModel& model, const std::vector<double>& x, double tol = 1e-6);
    std::size_t parked() const { return parked_.size(); }

private:
    struct Parked {
        std::vector<LpTerm> terms;
        double rhs;
    };
    int first_;
    int limit_;
    std::vector<Parked> parked_;
};

/// Sum of |S_j| over the real tasks of a store.
long domain_size(const DomainStore& store, int n);

struct ReductionReport {
    long initial_size = 0;
    long after_cp = 0;
    long after_lp = 0;
    int fixed_tasks = 0;  // |S_j| = 1 after the LP stage
    long lp_solves = 0;
    int cuts_added = 0;
    int passes = 0;
    double cp_ms = 0.0;
    double lp_ms = 0.0;
};

struct ReductionOptions {
    CutLoopSettings cuts;
    int max_passes = 3;
    /// Starting domains for the real tasks; the eligible sets when absent.
    const DomainStore* seed = nullptr;
    PruneObserver on_prune;
};

struct ReductionResult {
    bool feasible = true;
    std::string failed_stage;  // "cp" or "lp" when infeasible
    DomainStore domains;       // real tasks only
    ReductionReport report;
    CutPool pool;              // cuts found during the LP stage
};

/// CP propagation, then per-task min/max LPs of sum i x_ij with the cut loop,
/// pruning i < ceil(gamma1 - 1e-6) and i > floor(gamma2 + 1e-6), propagating
/// after every removal, for up to max_passes passes.
ReductionResult reduce_problem(const Instance& inst, const ReductionOptions& options = {});

/// Column bounds at a search node.
struct NodeBounds {
    std::vector<double> lower;
    std::vector<double> upper;
};

NodeBounds root_bounds(const IpModel& model);

/// Domains from upper bounds (forced to {i} where a lower bound is 1), CP
/// propagation, removals written back as upper = 0. False when propagation
/// fails.
bool node_propagate(const IpModel& model, const CpModel& cp, NodeBounds& bounds);

/// Labels over the support S_j = {i : x_ij > 1e-6}; the result has passed
/// check_assignment against `inst`.
std::optional<Assignment> round_solution(const Instance& inst, const IpModel& model, const std::vector<double>& x,
                                         const LabelBudget& budget = {});

}  // namespace salb

#endif  // SALB_HYBRID_HPP
