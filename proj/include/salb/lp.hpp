#ifndef SALB_LP_HPP
#define SALB_LP_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace salb {

enum class RowSense { less_equal, greater_equal, equal };
enum class ObjSense { minimize, maximize };
enum class LpStatus { optimal, infeasible, iteration_limit };

struct LpTerm {
    int col;
    double coef;
};

struct LpOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-7;
    /// 0 selects 50 * (rows + cols).
    long iteration_limit = 0;
    int refactor_interval = 100;
    long degenerate_before_bland = 1000;
    /// Shift costs during the dual phase, then clean up with the primal.
    bool perturb = true;
};

/// Basis snapshot usable as a warm start. Rows added after the snapshot
/// enter with their slack basic.
struct LpBasis {
    int cols = 0;
    int rows = 0;
    std::vector<int> head;            // basic variable per row position
    std::vector<std::int8_t> status;  // per variable, see LpProblem
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    long iterations = 0;
};

class LpNumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bounded-variable LP with column bounds inside [0, 1].
///
/// Solved by a dual simplex over the rows a.x + s = b. Every slack gets the
/// finite range implied by the [0, 1] box, so all variables are boxed and any
/// basis becomes dual feasible by moving nonbasic variables to the bound that
/// matches their reduced cost. That makes warm starts after cut rows, bound
/// changes and objective changes uniform: no phase one is ever needed.
class LpProblem {
public:
    explicit LpProblem(LpOptions options = {}) : opt_(options) {}

    int add_column(double lo, double hi, double cost = 0.0);
    int add_row(std::span<const LpTerm> terms, RowSense sense, double rhs);
    int add_row(std::initializer_list<LpTerm> terms, RowSense sense, double rhs) {
        return add_row(std::span<const LpTerm>(terms.begin(), terms.size()), sense, rhs);
    }

    /// Throws std::invalid_argument unless 0 <= lo <= hi <= 1.
    /// Deletes the given rows and renumbers the rest in order. Returns the
    /// new index of every old row, -1 for removed ones. The basis survives
    /// when every removed row has its slack basic.
    std::vector<int> remove_rows(std::span<const int> rows);
    /// Carries a snapshot across remove_rows; empty if a removed slack was
    /// nonbasic in it.
    LpBasis remap_basis(const LpBasis& b, std::span<const int> row_map) const;

    void set_bounds(int col, double lo, double hi);
    void set_objective(std::span<const LpTerm> terms, ObjSense sense);
    void set_objective(std::initializer_list<LpTerm> terms, ObjSense sense) {
        set_objective(std::span<const LpTerm>(terms.begin(), terms.size()), sense);
    }

    /// Continues from the previous basis unless a warm start is given.
    LpSolution solve();
    LpSolution solve(const LpBasis& warm);
    LpBasis basis() const;

    int num_cols() const { return ncols_; }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    double lower(int col) const { return lo_[static_cast<std::size_t>(col)]; }
    double upper(int col) const { return hi_[static_cast<std::size_t>(col)]; }
    double cost(int col) const { return user_cost_[static_cast<std::size_t>(col)]; }
    ObjSense sense() const { return sense_; }
    std::span<const LpTerm> row(int r) const { return rows_[static_cast<std::size_t>(r)].terms; }
    RowSense row_sense(int r) const { return rows_[static_cast<std::size_t>(r)].sense; }
    double row_rhs(int r) const { return rows_[static_cast<std::size_t>(r)].rhs; }

    /// Largest row or bound violation of x.
    double max_violation(std::span<const double> x) const;
    double objective_value(std::span<const double> x) const;

    const LpOptions& options() const { return opt_; }
    void set_options(const LpOptions& o) { opt_ = o; }

private:
    static constexpr std::int8_t kBasic = 0;
    static constexpr std::int8_t kLower = 1;
    static constexpr std::int8_t kUpper = 2;

    struct Row {
        std::vector<LpTerm> terms;
        RowSense sense;
        double rhs;
    };
    struct ColEntry {
        int row;
        double coef;
    };

    int nvars() const { return ncols_ + num_rows(); }
    bool is_slack(int v) const { return v >= ncols_; }
    double var_lo(int v) const;
    double var_hi(int v) const;
    double nb_value(int v) const;
    void slack_range(const Row& row, double& lo, double& hi) const;

    bool refactor();
    void reset_to_slack_basis();
    void install_basis(const LpBasis& warm);
    void compute_primal();
    double internal_cost(int v) const;
    void compute_duals();
    void flip_to_dual_feasible();
    double alpha(const std::vector<double>& rho, int v) const;
    std::vector<double> ftran(int v) const;
    void pivot(int r, int q, const std::vector<double>& w);
    LpSolution run(bool shift = true);
    LpSolution run_dual();
    LpSolution run_primal();
    bool basics_within_bounds(double tol) const;
    void extract(LpSolution& sol);

    LpOptions opt_;
    int ncols_ = 0;
    std::vector<double> lo_, hi_, user_cost_;
    std::vector<std::vector<ColEntry>> cols_;
    std::vector<Row> rows_;
    std::vector<double> slack_lo_, slack_hi_;
    ObjSense sense_ = ObjSense::minimize;

    // Basis state. binv_ is dense row-major, size rows x rows.
    std::vector<int> head_;
    std::vector<std::int8_t> status_;
    std::vector<double> binv_;
    int factored_rows_ = 0;
    bool factor_valid_ = false;
    int pivots_since_refactor_ = 0;
    bool primal_valid_ = false;  // xb_ matches the current basis and bounds

    std::vector<double> xb_;  // basic values by position
    std::vector<double> dj_;
    std::vector<double> perturb_;
  // internal cost shifts during the dual phase  // reduced costs by variable (internal minimisation)
};

}  // namespace salb

#endif  // SALB_LP_HPP
