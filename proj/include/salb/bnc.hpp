#ifndef SALB_BNC_HPP
#define SALB_BNC_HPP

#include <chrono>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "salb/cp.hpp"
#include "salb/cuts.hpp"
#include "salb/hybrid.hpp"
#include "salb/instance.hpp"
#include "salb/ip_model.hpp"

namespace salb {

enum class CutPlacement { root_only, every_node };
enum class ObjectiveMode { outer_loop, station_cost };
/// branch_and_cut is the IP search; labeling skips the LP after reduction.
enum class Engine { branch_and_cut, labeling };

struct SolverConfig {
    Engine engine = Engine::branch_and_cut;
    CutMode cut_mode = CutMode::all;
    CutPlacement placement = CutPlacement::every_node;
    int max_rounds = 5;
    int cuts_per_round = 20;
    int cuts_per_node = 50;
    bool lift_cuts = true;
    double integrality_tol = 1e-6;
    double violation_tol = 1e-4;
    bool reduce = true;
    int reduction_passes = 3;
    bool node_propagation = true;
    bool rounding = true;
    LabelBudget rounding_budget{2'000, std::chrono::milliseconds(50)};
    long node_limit = 0;                      // <= 0 means unlimited
    std::chrono::milliseconds time_limit{0};  // <= 0 means unlimited
    ObjectiveMode objective = ObjectiveMode::outer_loop;
    CutObserver on_cut;
    PruneObserver on_prune;
    std::function<void(const std::string&)> log;
    /// Called with m before each fixed-m solve of minimize_stations.
    std::function<void(int)> on_solve_start;
};

/// Throws std::invalid_argument on negative caps or non-positive tolerances.
void validate_config(const SolverConfig& cfg);

enum class SolveGoal { optimize, feasibility };
enum class SolveStatus { optimal, feasible, infeasible, limit };

const char* solve_status_name(SolveStatus s);

/// Search node: column bounds, the parent's final basis and the parent bound.
struct SearchNode {
    NodeBounds bounds;
    LpBasis basis;
    int depth = 0;
    double bound = 0.0;
};

struct FixedMResult {
    /// optimal: proven for the objective (or any feasible point for the
    /// feasibility goal); feasible: incumbent at a limit; limit: none found.
    SolveStatus status = SolveStatus::limit;
    std::optional<Assignment> assignment;
    long nodes = 0;
    long cuts = 0;
    double best_bound = 0.0;  // lowest open bound when stopped at a limit
    bool reduced = false;
    ReductionReport reduction;
    /// LP bound at each processed node next to its parent's.
    std::vector<std::pair<double, double>> bound_trail;
};

FixedMResult solve_fixed_m(const Instance& inst, int m, const SolverConfig& cfg,
                           SolveGoal goal = SolveGoal::optimize);

struct StationsResult {
    SolveStatus status = SolveStatus::limit;
    OptimumReport report;
};

/// Outer loop from the first-fit bound downward (outer_loop), or one
/// optimisation with the cost scheme over the first-fit station count
/// (station_cost).
StationsResult minimize_stations(const Instance& inst, const SolverConfig& cfg = {});

struct BranchDecision {
    int column = -1;
    int station = 0;
    int task = -1;
};

/// Most fractional column; ties by larger task time, then lower station,
/// then lower task. Empty when x is integral within tol.
std::optional<BranchDecision> select_branch(const IpModel& model, const Instance& inst, const std::vector<double>& x,
                                            double tol = 1e-6);

/// "j station" per task (1-based), then the summary line.
void write_solution(std::ostream& out, const OptimumReport& report);

}  // namespace salb

#endif  // SALB_BNC_HPP
